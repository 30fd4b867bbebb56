//! Parameter sweeps: a Cartesian grid of runs with a merged summary table.
//!
//! A sweep spec is the same flat `key = value` format as a run config plus
//! an `output_root` and any of the axis keys `sweep_ab`, `sweep_alpha`,
//! `sweep_mu`, `sweep_n`, `sweep_init`. Non-axis keys form the per-cell
//! template; each cell overrides the template with its axis values and runs
//! through the ordinary runner into `output_root/cell_NNNN`. Cells share
//! nothing and execute concurrently up to the worker budget; the summary is
//! assembled by a single writer after all cells finish, in cell order, so
//! the whole tree is deterministic. A failing cell is recorded in its
//! summary row and the sweep continues.
//!
//! Example:
//!
//! ```text
//! schema = 1
//! output_root = sweep-out
//! sweep_alpha = 1.5, 2.5, 3.0
//! sweep_ab = (1,0) (0,1) (1,1)
//! n = 256
//! mu = 1.0
//! init = rough:2.5,7
//! amplitude = 0.1
//! cfl = 0.4
//! t_end = 0.1
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use crate::config::{parse_kv, RunConfig};
use crate::runner::execute_run;
use crate::{EXIT_NAN, EXIT_OK, EXIT_USAGE};

/// One resolved sweep cell: the template with axis overrides applied.
#[derive(Debug, Clone)]
struct Cell {
    overrides: Vec<(String, String)>,
}

/// Parsed sweep specification.
#[derive(Debug)]
pub struct SweepSpec {
    /// Root directory receiving one subdirectory per cell.
    pub output_root: PathBuf,
    template: BTreeMap<String, String>,
    cells: Vec<Cell>,
}

/// Outcome of a whole sweep.
#[derive(Debug)]
pub struct SweepOutcome {
    /// Root directory of the result tree.
    pub root: PathBuf,
    /// Number of cells executed.
    pub cells: usize,
    /// Worst-severity exit code across cells (0 when every cell completed
    /// or ended on a scientific finding).
    pub exit_code: i32,
}

fn parse_pairs(value: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for token in value.split_whitespace() {
        let inner = token
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .with_context(|| format!("sweep_ab entry '{token}' is not of the form (a,b)"))?;
        let (a, b) = inner
            .split_once(',')
            .with_context(|| format!("sweep_ab entry '{token}' is not of the form (a,b)"))?;
        pairs.push((a.trim().to_string(), b.trim().to_string()));
    }
    if pairs.is_empty() {
        bail!("sweep_ab lists no pairs");
    }
    Ok(pairs)
}

fn parse_list(key: &str, value: &str, sep: char) -> Result<Vec<String>> {
    let items: Vec<String> = value
        .split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    if items.is_empty() {
        bail!("axis '{key}' lists no values");
    }
    Ok(items)
}

impl SweepSpec {
    /// Parses a spec file; `output_root` is resolved against the file's
    /// directory when relative.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading sweep spec {}", path.display()))?;
        let mut map = parse_kv(&text)?;

        let root = map
            .remove("output_root")
            .context("sweep spec needs 'output_root'")?;
        let mut output_root = PathBuf::from(root);
        if output_root.is_relative() {
            if let Some(dir) = path.parent() {
                output_root = dir.join(output_root);
            }
        }

        // Axes, outermost first; absent axes contribute a single no-op.
        let ab: Vec<Option<(String, String)>> = match map.remove("sweep_ab") {
            Some(v) => parse_pairs(&v)?.into_iter().map(Some).collect(),
            None => vec![None],
        };
        let alpha: Vec<Option<String>> = optional_axis(&mut map, "sweep_alpha", ',')?;
        let mu: Vec<Option<String>> = optional_axis(&mut map, "sweep_mu", ',')?;
        let n: Vec<Option<String>> = optional_axis(&mut map, "sweep_n", ',')?;
        let init: Vec<Option<String>> = optional_axis(&mut map, "sweep_init", ';')?;

        let mut cells = Vec::new();
        for pair in &ab {
            for al in &alpha {
                for m in &mu {
                    for nn in &n {
                        for ini in &init {
                            let mut overrides = Vec::new();
                            if let Some((a, b)) = pair {
                                overrides.push(("model".to_string(), "full".to_string()));
                                overrides.push(("a".to_string(), a.clone()));
                                overrides.push(("b".to_string(), b.clone()));
                            }
                            if let Some(v) = al {
                                overrides.push(("alpha".to_string(), v.clone()));
                            }
                            if let Some(v) = m {
                                overrides.push(("mu".to_string(), v.clone()));
                            }
                            if let Some(v) = nn {
                                overrides.push(("n".to_string(), v.clone()));
                            }
                            if let Some(v) = ini {
                                overrides.push(("init".to_string(), v.clone()));
                            }
                            cells.push(Cell { overrides });
                        }
                    }
                }
            }
        }

        Ok(SweepSpec {
            output_root,
            template: map,
            cells,
        })
    }

    /// Number of cells the Cartesian product spans.
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    fn cell_config(&self, cell: &Cell) -> Result<RunConfig> {
        let mut map = self.template.clone();
        for (k, v) in &cell.overrides {
            map.insert(k.clone(), v.clone());
        }
        RunConfig::from_map(map)
    }
}

fn optional_axis(
    map: &mut BTreeMap<String, String>,
    key: &str,
    sep: char,
) -> Result<Vec<Option<String>>> {
    Ok(match map.remove(key) {
        Some(v) => parse_list(key, &v, sep)?.into_iter().map(Some).collect(),
        None => vec![None],
    })
}

/// One summary row, already formatted.
struct CellRow {
    fields: Vec<String>,
    exit_code: i32,
}

fn empty() -> String {
    String::new()
}

/// Quotes a CSV field when it contains a comma or quote.
fn csv_field(s: &String) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.clone()
    }
}

fn run_cell(spec: &SweepSpec, index: usize, cell: &Cell) -> CellRow {
    let name = format!("cell_{index:04}");
    let dir = spec.output_root.join(&name);
    match spec.cell_config(cell) {
        Err(e) => CellRow {
            fields: vec![
                name,
                empty(),
                empty(),
                empty(),
                empty(),
                empty(),
                empty(),
                empty(),
                format!("config-error: {e:#}"),
                empty(),
                empty(),
                empty(),
            ],
            exit_code: EXIT_USAGE,
        },
        Ok(cfg) => {
            let params = cfg.model_params().expect("validated at parse");
            let head = vec![
                name,
                cfg.model.clone(),
                format!("{:?}", params.a),
                format!("{:?}", params.b),
                format!("{:?}", params.alpha),
                format!("{:?}", params.mu),
                cfg.n.to_string(),
                cfg.init.to_string(),
            ];
            match execute_run(&cfg, &dir) {
                Ok(outcome) => CellRow {
                    fields: head
                        .into_iter()
                        .chain([
                            outcome.termination.clone(),
                            outcome
                                .resolved_until
                                .map_or_else(empty, |v| format!("{v:?}")),
                            outcome
                                .lip_growth_factor
                                .map_or_else(empty, |v| format!("{v:?}")),
                            outcome.verdict.clone().unwrap_or_default(),
                        ])
                        .collect(),
                    exit_code: if outcome.exit_code == EXIT_NAN {
                        EXIT_NAN
                    } else {
                        EXIT_OK
                    },
                },
                Err(e) => CellRow {
                    fields: head
                        .into_iter()
                        .chain([
                            format!("run-error: {e:#}"),
                            empty(),
                            empty(),
                            empty(),
                        ])
                        .collect(),
                    exit_code: EXIT_USAGE,
                },
            }
        }
    }
}

/// Executes every cell (up to `workers` concurrently) and writes
/// `summary.csv` under the output root.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepOutcome> {
    if workers == 0 {
        bail!("--workers must be >= 1");
    }
    if spec.cell_count() == 0 {
        bail!("sweep spans no cells");
    }
    fs::create_dir_all(&spec.output_root)
        .with_context(|| format!("creating {}", spec.output_root.display()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    let rows: Vec<CellRow> = pool.install(|| {
        use rayon::prelude::*;
        spec.cells
            .par_iter()
            .enumerate()
            .map(|(i, cell)| run_cell(spec, i, cell))
            .collect()
    });

    let summary = spec.output_root.join("summary.csv");
    let mut w = std::io::BufWriter::new(
        fs::File::create(&summary).with_context(|| format!("creating {}", summary.display()))?,
    );
    writeln!(
        w,
        "cell,model,a,b,alpha,mu,n,init,termination,resolved_until,lip_growth_factor,verdict"
    )?;
    for row in &rows {
        let line: Vec<String> = row.fields.iter().map(csv_field).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;

    // Findings are science, not failures; config errors outrank NaN aborts.
    let exit_code = if rows.iter().any(|r| r.exit_code == EXIT_USAGE) {
        EXIT_USAGE
    } else if rows.iter().any(|r| r.exit_code == EXIT_NAN) {
        EXIT_NAN
    } else {
        EXIT_OK
    };
    Ok(SweepOutcome {
        root: spec.output_root.clone(),
        cells: rows.len(),
        exit_code,
    })
}
