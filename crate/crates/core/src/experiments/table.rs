//! The eight comparison tables: layer, initial data and method rows per
//! table, and the runner that fills them.

use serde::{Deserialize, Serialize};

use crate::config::{Method, SimConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::init::InitialCondition;
use crate::profile::AbsorptionProfile;
use crate::reference::{measure, reference_run_with, Measurement, ReferenceOptions, ReferenceWalls};

/// Seed of the random initial data in Tables 7 and 8.
pub const DEFAULT_SEED: u64 = 20_260_713;

fn all_refinements() -> Vec<u32> {
    vec![0, 1, 2]
}

fn table_rows() -> Vec<Method> {
    Method::TABLE_ROWS.to_vec()
}

fn default_smart_mu() -> f64 {
    2.0
}

fn shared_walls() -> ReferenceWalls {
    ReferenceWalls::Shared
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// One comparison table. Only the table number is required; the layer and
/// the initial data follow from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub table_id: u8,
    #[serde(default = "all_refinements")]
    pub refinements: Vec<u32>,
    #[serde(default = "table_rows")]
    pub methods: Vec<Method>,
    /// Absorption multiplier applied to the smart and HML rows only.
    #[serde(default = "default_smart_mu")]
    pub smart_mu: f64,
    #[serde(default = "shared_walls")]
    pub reference_walls: ReferenceWalls,
    /// Used by the random-data tables only.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// A block of table columns sharing one incidence direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColumnGroup {
    pub label: &'static str,
    pub direction: Option<[f64; 2]>,
}

impl TableSpec {
    pub fn published(table_id: u8) -> Result<Self> {
        let spec = TableSpec {
            table_id,
            refinements: all_refinements(),
            methods: table_rows(),
            smart_mu: default_smart_mu(),
            reference_walls: shared_walls(),
            seed: DEFAULT_SEED,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_refinements(mut self, refinements: Vec<u32>) -> Self {
        self.refinements = refinements;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.table_id) {
            return Err(Error::config(
                "table_id",
                format!("must be between 1 and 8, got {}", self.table_id),
            ));
        }
        if self.refinements.is_empty() {
            return Err(Error::config("refinements", "must not be empty"));
        }
        if let Some(r) = self.refinements.iter().find(|&&r| r > 3) {
            return Err(Error::config(
                "refinements",
                format!("levels above 3 are not supported, got {r}"),
            ));
        }
        let mut sorted = self.refinements.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.refinements.len() {
            return Err(Error::config("refinements", "levels must be distinct"));
        }
        if self.methods.is_empty() {
            return Err(Error::config("methods", "must not be empty"));
        }
        if self.methods.contains(&Method::Maxwell) {
            return Err(Error::config("methods", "maxwell has no layer to compare"));
        }
        if !(self.smart_mu.is_finite() && self.smart_mu > 0.0) {
            return Err(Error::config(
                "smart_mu",
                format!("need a finite value > 0, got {}", self.smart_mu),
            ));
        }
        Ok(())
    }

    /// Absorption profile: constant on tables 1, 2, 5 (σ = 2) and 7 (σ = 3),
    /// cubic `(x−6)³/8` otherwise.
    pub fn layer(&self) -> AbsorptionProfile {
        match self.table_id {
            1 | 2 | 5 => AbsorptionProfile::constant(2.0, 6.0, 10.0),
            7 => AbsorptionProfile::constant(3.0, 6.0, 10.0),
            _ => AbsorptionProfile::cubic(0.125, 6.0, 10.0),
        }
    }

    pub fn init(&self) -> InitialCondition {
        match self.table_id {
            1 | 3 => InitialCondition::bump(10.0, [1.0, 0.0]),
            2 | 4 => InitialCondition::bump(1.0, [1.0, 0.0]),
            5 | 6 => InitialCondition::gaussian(),
            _ => InitialCondition::random(self.seed),
        }
    }

    pub fn groups(&self) -> Vec<ColumnGroup> {
        if self.table_id <= 4 {
            vec![
                ColumnGroup {
                    label: "normal",
                    direction: Some([1.0, 0.0]),
                },
                ColumnGroup {
                    label: "oblique45",
                    direction: Some([1.0, 1.0]),
                },
            ]
        } else {
            vec![ColumnGroup {
                label: "all",
                direction: None,
            }]
        }
    }

    /// Absorption multiplier of `method` in this table.
    pub fn mu_for(&self, method: Method) -> f64 {
        if method == Method::Smart || method.is_hml() {
            self.smart_mu
        } else {
            1.0
        }
    }

    /// Configuration of one table cell.
    pub fn cell_config(&self, method: Method, group: usize, refinement: u32) -> Result<SimConfig> {
        let g = self.groups().get(group).copied().ok_or_else(|| {
            Error::config("group", format!("table {} has no column group {group}", self.table_id))
        })?;
        let mut cfg = SimConfig::baseline(method).with_refinement(refinement);
        cfg.layer = self.layer();
        cfg.mu = self.mu_for(method);
        cfg.init = match (self.init(), g.direction) {
            (InitialCondition::ModulatedBump { center, radius, k, envelope, .. }, Some(direction)) => {
                InitialCondition::ModulatedBump {
                    center,
                    radius,
                    k,
                    direction,
                    envelope,
                }
            }
            (init, _) => init,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// How a batch of runs is executed and recorded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub exec: Exec,
    /// Keep `|Hz − Hz_ref|` at the final level of every cell.
    pub snapshots: bool,
    /// Record wall-clock runtimes. Without them every output is a pure
    /// function of the inputs.
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            exec: Exec::default(),
            snapshots: false,
            timings: true,
        }
    }
}

/// One filled (or failed) table cell.
#[derive(Clone, Debug)]
pub struct TableCell {
    pub method: Method,
    pub group: usize,
    pub refinement: u32,
    pub outcome: std::result::Result<Measurement, String>,
}

impl TableCell {
    pub fn value(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|m| m.report.linf_error)
    }
}

#[derive(Clone, Debug)]
pub struct TableRun {
    pub spec: TableSpec,
    pub cells: Vec<TableCell>,
}

impl TableRun {
    pub fn cell(&self, method: Method, group: usize, refinement: u32) -> Option<&TableCell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.group == group && c.refinement == refinement)
    }

    pub fn value(&self, method: Method, group: usize, refinement: u32) -> Option<f64> {
        self.cell(method, group, refinement).and_then(TableCell::value)
    }

    /// Row of `method` in `group`, ordered like `spec.refinements`.
    pub fn row(&self, method: Method, group: usize) -> Vec<Option<f64>> {
        self.spec
            .refinements
            .iter()
            .map(|&r| self.value(method, group, r))
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &TableCell> {
        self.cells.iter().filter(|c| c.outcome.is_err())
    }
}

/// Fills every cell of `spec`. The reference of each (direction, refinement)
/// pair is computed once and shared by all method rows; a cell that fails is
/// recorded with its error and the others still run.
pub fn run_table(spec: &TableSpec, opts: &RunOptions) -> Result<TableRun> {
    spec.validate()?;
    let ref_opts = ReferenceOptions {
        walls: spec.reference_walls,
        exec: opts.exec,
        ..ReferenceOptions::default()
    };
    let mut cells = Vec::new();
    for group in 0..spec.groups().len() {
        for &refinement in &spec.refinements {
            let configs: Vec<(Method, SimConfig)> = spec
                .methods
                .iter()
                .map(|&m| Ok((m, spec.cell_config(m, group, refinement)?)))
                .collect::<Result<_>>()?;
            let reference = reference_run_with(&configs[0].1, &ref_opts);
            let outcomes = opts.exec.map(configs, |(method, cfg)| {
                let outcome = match &reference {
                    Ok(h) => {
                        let at = opts.snapshots.then(|| cfg.grid().n_steps);
                        measure(&cfg, h, opts.exec, at).map_err(|e| e.to_string())
                    }
                    Err(e) => Err(format!("reference failed: {e}")),
                };
                (method, outcome)
            });
            for (method, mut outcome) in outcomes {
                if !opts.timings {
                    if let Ok(m) = &mut outcome {
                        m.report.runtime = 0.0;
                        m.stats.runtime = 0.0;
                    }
                }
                cells.push(TableCell {
                    method,
                    group,
                    refinement,
                    outcome,
                });
            }
        }
    }
    Ok(TableRun {
        spec: spec.clone(),
        cells,
    })
}
