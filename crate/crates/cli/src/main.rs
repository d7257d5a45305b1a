use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ribbon_core::dimers;
use ribbon_core::geometry::{self, Cell, Region};
use ribbon_core::projection::{self, ImageTiling, LiftChoices, Side};
use ribbon_core::propagation::propagate;
use ribbon_core::solver::{count_tilings_with, enumerate_tilings, validate_tiling, Tiling};
use ribbon_core::structure::{crack_from_decomposition, decompose, validate_crack};
use ribbon_core::tiles::TileSet;
use ribbon_core::verify::{Golden, Status, Suite, Verifier, VerifyOptions, CRITERIA};
use ribbon_core::BigCount;

mod render;

#[derive(Parser)]
#[command(
    name = "ribbon",
    version,
    about = "Ribbon L-tetromino tilings of deficient squares"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count tilings of a region.
    Count {
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Write tilings as JSON lines, in canonical order.
    Enumerate {
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decomposition, crack report and verdict of one tiling.
    Analyze {
        #[command(flatten)]
        region: RegionArgs,
        #[command(flatten)]
        source: TilingSource,
    },
    /// Image of one tiling under the half-scale map.
    Project {
        #[command(flatten)]
        region: RegionArgs,
        #[command(flatten)]
        source: TilingSource,
        /// also print the choices that lift the image back to this tiling
        #[arg(long)]
        with_choices: bool,
    },
    /// Tiling of a deficient square lifted from an image.
    Lift {
        /// image JSON file (`-` for stdin)
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        side: usize,
        #[arg(long)]
        missing_pos: usize,
        #[arg(long)]
        variant_bit: Option<u8>,
        /// side of a diagonal monomer, as `K=lower` or `K=upper` for image cell (K,K)
        #[arg(long = "monomer-side", value_parser = parse_monomer_side)]
        monomer_sides: Vec<(usize, Side)>,
    },
    /// Domino and domino+monomer counts.
    Dimers {
        #[arg(long)]
        board: usize,
        /// remove this diagonal cell (1-indexed)
        #[arg(long)]
        missing_pos: Option<usize>,
        /// print the diagonal-monomer profile
        #[arg(long)]
        profile: bool,
        /// print N(m) = sum 2^k N_k for the board 2m = --board
        #[arg(long)]
        capital_n: bool,
        #[arg(long)]
        include_k0: bool,
        /// also evaluate the closed product formula
        #[arg(long)]
        kasteleyn: bool,
    },
    /// Extend a tiling to the square of side +4 with the same missing cell.
    Propagate {
        #[command(flatten)]
        region: RegionArgs,
        #[command(flatten)]
        source: TilingSource,
        /// write the new region text here
        #[arg(long)]
        region_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw one tiling.
    Render {
        #[command(flatten)]
        region: RegionArgs,
        #[command(flatten)]
        source: TilingSource,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, default_value = "quick")]
        suite: Suite,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// JSON file overriding reference values
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

#[derive(Args)]
struct RegionArgs {
    /// side of a deficient square
    #[arg(long, conflicts_with = "region")]
    square: Option<usize>,
    /// missing cell as R,C (0-indexed)
    #[arg(long, value_parser = parse_cell, conflicts_with = "missing_pos")]
    missing: Option<Cell>,
    /// missing cell as a 1-indexed diagonal position
    #[arg(long)]
    missing_pos: Option<usize>,
    /// region text file (`#` present, `.` absent, `*` missing)
    #[arg(long)]
    region: Option<PathBuf>,
    #[arg(long, default_value = "t4")]
    tileset: TileSet,
}

#[derive(Args)]
struct TilingSource {
    /// JSON-lines tiling file (`-` for stdin)
    #[arg(long, conflicts_with = "index")]
    tiling: Option<PathBuf>,
    /// 1-indexed line of the tiling file
    #[arg(long, default_value_t = 1, requires = "tiling")]
    line: usize,
    /// 0-indexed tiling in canonical enumeration order
    #[arg(long)]
    index: Option<usize>,
}

/// A command line that parsed but does not make sense.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_cell(s: &str) -> Result<Cell, String> {
    let (r, c) = s
        .split_once(',')
        .ok_or_else(|| format!("expected R,C, got {s:?}"))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok(Cell::new(num(r)?, num(c)?))
}

fn parse_monomer_side(s: &str) -> Result<(usize, Side), String> {
    let (k, side) = s
        .split_once('=')
        .ok_or_else(|| format!("expected K=lower|upper, got {s:?}"))?;
    let k = k
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("{k:?}: {e}"))?;
    let side = match side.trim() {
        "lower" => Side::Lower,
        "upper" => Side::Upper,
        other => return Err(format!("unknown side {other:?}")),
    };
    Ok((k, side))
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        return io::read_to_string(io::stdin()).context("reading stdin");
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

impl RegionArgs {
    fn load(&self) -> Result<Region> {
        match (self.square, &self.region) {
            (Some(side), None) => {
                let missing = match (self.missing, self.missing_pos) {
                    (Some(c), None) => c,
                    (None, Some(p)) if p >= 1 => Cell::new(p - 1, p - 1),
                    (None, Some(_)) => return Err(usage("--missing-pos is 1-indexed")),
                    _ => return Err(usage("--square needs --missing R,C or --missing-pos P")),
                };
                geometry::make_deficient_square(side, missing).map_err(|e| usage(e.to_string()))
            }
            (None, Some(path)) => {
                if self.missing.is_some() || self.missing_pos.is_some() {
                    return Err(usage("--missing applies to --square only"));
                }
                Ok(geometry::parse_region(&read_input(path)?)?)
            }
            _ => Err(usage("give exactly one of --square or --region")),
        }
    }
}

impl TilingSource {
    fn load(&self, region: &Region, set: TileSet) -> Result<Tiling> {
        let tiling = match &self.tiling {
            Some(path) => {
                let text = read_input(path)?;
                let line = text
                    .lines()
                    .filter(|l| !l.trim().is_empty())
                    .nth(self.line.saturating_sub(1))
                    .ok_or_else(|| {
                        anyhow!("{} has no tiling on line {}", path.display(), self.line)
                    })?;
                Tiling::from_json(line).context("parsing tiling JSON")?
            }
            None => {
                let i = self.index.unwrap_or(0);
                enumerate_tilings(region, set, Some(i + 1))?
                    .nth(i)
                    .ok_or_else(|| anyhow!("the region has fewer than {} tilings", i + 1))?
            }
        };
        if let Err(v) = validate_tiling(region, &tiling) {
            bail!(
                "tiling is not an exact cover of the region: {}",
                serde_json::to_string(&v)?
            );
        }
        Ok(tiling)
    }
}

fn big_json(v: &BigCount) -> serde_json::Value {
    match u64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Count {
            region,
            json,
            threads,
        } => {
            let r = region.load()?;
            let n: BigCount = count_tilings_with(&r, region.tileset, threads)?;
            if json {
                let doc = json!({ "tileset": region.tileset.name(), "region": r.to_text(), "count": big_json(&n) });
                writeln!(stdout, "{doc}")?;
            } else {
                writeln!(stdout, "{n}")?;
            }
        }
        Command::Enumerate { region, limit, out } => {
            let r = region.load()?;
            let mut w = output(out.as_deref())?;
            for t in enumerate_tilings(&r, region.tileset, limit)? {
                writeln!(w, "{}", t.to_json_line())?;
            }
            w.flush()?;
        }
        Command::Analyze { region, source } => {
            let r = region.load()?;
            let t = source.load(&r, region.tileset)?;
            let d = decompose(&r, &t)?;
            let mut doc = json!({ "decomposition": &d });
            if let Some(side) = r.deficient_square_side() {
                let report = crack_from_decomposition(&r, &d)?;
                let verdict = validate_crack(&report, side, region.tileset);
                doc["crack"] = serde_json::to_value(&report)?;
                doc["verdict"] = serde_json::to_value(&verdict)?;
                doc["verdict"]["ok"] = json!(verdict.is_ok());
            }
            writeln!(stdout, "{doc}")?;
        }
        Command::Project {
            region,
            source,
            with_choices,
        } => {
            let r = region.load()?;
            let t = source.load(&r, region.tileset)?;
            let image = projection::project(&r, &t)?;
            if with_choices {
                let choices = projection::lift_choices(&r, &t)?;
                writeln!(stdout, "{}", json!({ "image": image, "choices": choices }))?;
            } else {
                writeln!(stdout, "{}", image.to_json())?;
            }
        }
        Command::Lift {
            image,
            side,
            missing_pos,
            variant_bit,
            monomer_sides,
        } => {
            let image: ImageTiling =
                serde_json::from_str(&read_input(&image)?).context("parsing image JSON")?;
            let choices = LiftChoices {
                variant_bit,
                monomer_sides: monomer_sides
                    .into_iter()
                    .map(|(k, s)| (Cell::new(k, k), s))
                    .collect(),
            };
            let t = projection::lift(&image, side, missing_pos, &choices)?;
            writeln!(stdout, "{}", t.to_json_line())?;
        }
        Command::Dimers {
            board,
            missing_pos,
            profile,
            capital_n,
            include_k0,
            kasteleyn,
        } => {
            if profile {
                let p = match missing_pos {
                    Some(pos) => dimers::diagonal_profile_deficient(board, pos)?,
                    None => dimers::diagonal_profile(board)?,
                };
                writeln!(stdout, "{}", serde_json::to_string(&p)?)?;
            } else if capital_n {
                if board % 2 == 1 || board == 0 {
                    return Err(usage("--capital-n needs an even --board 2m"));
                }
                writeln!(stdout, "{}", dimers::capital_n(board / 2, include_k0)?)?;
            } else {
                let n = match missing_pos {
                    Some(pos) => dimers::count_dimer_deficient(board, pos)?,
                    None => dimers::count_dimer_tilings(board)?,
                };
                writeln!(stdout, "{n}")?;
                if kasteleyn {
                    if missing_pos.is_some() {
                        return Err(usage("--kasteleyn applies to full boards only"));
                    }
                    let k = dimers::kasteleyn_closed_form(board)?;
                    writeln!(stdout, "{k}")?;
                    if k != n {
                        bail!("closed form {k} disagrees with the profile count {n}");
                    }
                }
            }
        }
        Command::Propagate {
            region,
            source,
            region_out,
            out,
        } => {
            let r = region.load()?;
            let t = source.load(&r, region.tileset)?;
            let (nr, nt) = propagate(&r, &t, region.tileset)?;
            if let Some(path) = region_out {
                fs::write(&path, nr.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let mut w = output(out.as_deref())?;
            writeln!(w, "{}", nt.to_json_line())?;
            w.flush()?;
        }
        Command::Render {
            region,
            source,
            format,
            out,
        } => {
            let r = region.load()?;
            let t = source.load(&r, region.tileset)?;
            let text = match format {
                Format::Ascii => render::ascii(&r, &t),
                Format::Svg => render::svg(&r, &t),
            };
            let mut w = output(out.as_deref())?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        Command::Verify {
            suite,
            json,
            threads,
            golden,
        } => {
            let golden = match golden {
                Some(path) => serde_json::from_str::<Golden>(&read_input(&path)?)
                    .with_context(|| format!("parsing golden file {}", path.display()))?,
                None => Golden::default(),
            };
            let verifier = Verifier::new(VerifyOptions {
                suite,
                threads: threads.max(1),
                golden,
            });
            let report = verifier.run();
            if json {
                writeln!(stdout, "{}", report.to_json())?;
            } else {
                for (n, title) in CRITERIA {
                    let claims: Vec<_> =
                        report.claims.iter().filter(|c| c.criterion == n).collect();
                    let worst = if claims.iter().any(|c| c.status == Status::Fail) {
                        "FAIL"
                    } else if claims.iter().all(|c| c.status == Status::Recorded) {
                        "RECORDED"
                    } else {
                        "PASS"
                    };
                    writeln!(stdout, "[{worst}] {n:>2} {title} ({} claims)", claims.len())?;
                    for c in claims.iter().filter(|c| c.status != Status::Pass) {
                        writeln!(
                            stdout,
                            "       {} {}: observed {}",
                            c.status, c.claim, c.observed
                        )?;
                    }
                }
                let s = report.summary;
                writeln!(
                    stdout,
                    "{} pass, {} fail, {} recorded in {:.1?}",
                    s.pass, s.fail, s.recorded, report.runtime
                )?;
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
