//! Command-line front end: every planning module exposed as a subcommand
//! with file-based inputs and CSV/raster outputs.
//!
//! Exit codes: 0 on success, 2 for usage or validation problems, 3 for
//! numerical failures.

use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use tallcell::antenna::{
    lens_diameter_for_gain, lens_gain_dbi, panel_elements_for_gain, panel_gain_dbi, LensModel,
    Orientation, PanelArray, DEFAULT_ELEMENT_GAIN_DBI,
};
use tallcell::calibration::{
    fit_exponential, fit_spm, read_measurements, resolve_records, FreeMask, LinkConstants,
    ResolutionContext, COEFF_NAMES,
};
use tallcell::capacity::capacity_vs_sectors;
use tallcell::config::RunConfig;
use tallcell::coverage::{
    compute_rsrp_map, coverage_area_km2, coverage_ratio_table, ratio_table_csv, save_rsrp_asc,
    save_rsrp_pgm, RsrpMap,
};
use tallcell::error::Error;
use tallcell::format::sig6;
use tallcell::link::{evaluate_link_budget, mapl_db, BeamwidthModel, LinkBudgetInput};
use tallcell::propagation::{spm_pathloss_db, PathContext, SpmParams};
use tallcell::terrain::load_grid;
use tallcell::windload::{check_epa, epa_comparison_table, epa_table_csv, EpaBudget};

#[derive(Parser)]
#[command(
    name = "tallcell",
    version,
    about = "Coverage and capacity planning for tall-tower, high-order-sectorized cellular sites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a link budget: received power, noise, SNR and optional MAPL.
    Linkbudget(LinkbudgetArgs),
    /// Evaluate the tuned pathloss model at one context or over a distance sweep.
    Pathloss(PathlossArgs),
    /// 3-dB beamwidth for a given antenna gain.
    Beamwidth(BeamwidthArgs),
    /// Lens gain-vs-diameter lookups and radial permittivity.
    Lens(LensArgs),
    /// Panel array gain or inverse element sizing.
    Panel(PanelArgs),
    /// Wind-load comparison table across antenna technologies.
    Epa(EpaArgs),
    /// Capacity versus sector count for a given azimuth spread.
    Capacity(CapacityArgs),
    /// RSRP heatmap over a terrain raster.
    Heatmap(HeatmapArgs),
    /// Coverage-area comparison of two RSRP rasters.
    CoverageRatio(CoverageRatioArgs),
    /// Fit pathloss coefficients to a measurement CSV.
    Calibrate(CalibrateArgs),
    /// Fit the exponential spread-vs-pathloss law to a CSV.
    FitSigma(FitSigmaArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Numerical(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Linkbudget(args) => cmd_linkbudget(args),
        Command::Pathloss(args) => cmd_pathloss(args),
        Command::Beamwidth(args) => cmd_beamwidth(args),
        Command::Lens(args) => cmd_lens(args),
        Command::Panel(args) => cmd_panel(args),
        Command::Epa(args) => cmd_epa(args),
        Command::Capacity(args) => cmd_capacity(args),
        Command::Heatmap(args) => cmd_heatmap(args),
        Command::CoverageRatio(args) => cmd_coverage_ratio(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::FitSigma(args) => cmd_fit_sigma(args),
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content).map_err(Error::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Parses "start:stop:step" into an inclusive sweep.
fn parse_sweep(text: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::invalid(format!(
            "sweep must be start:stop:step, got {text}"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad sweep number: {p}")))
        })
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if step == 0.0 || (stop - start) * step < 0.0 {
        return Err(Error::invalid("sweep step must move from start toward stop"));
    }
    let mut values = Vec::new();
    let n = ((stop - start) / step).round() as i64;
    for i in 0..=n {
        values.push(start + step * i as f64);
    }
    Ok(values)
}

fn parse_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number in list: {t}")))
        })
        .collect()
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => RunConfig::from_toml_str(&fs::read_to_string(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn spm_from(band: Option<f64>, config: &RunConfig) -> Result<SpmParams, Error> {
    if let Some(b) = band {
        return if b == 728.0 {
            Ok(SpmParams::tuned_728_mhz())
        } else if b == 2500.0 {
            Ok(SpmParams::tuned_2500_mhz())
        } else {
            Err(Error::invalid(format!(
                "no tuned coefficients for band {b} MHz (have 728 and 2500)"
            )))
        };
    }
    match &config.spm {
        Some(spm) => spm.to_params(),
        None => Err(Error::invalid(
            "need --band or a [spm] section in the config file",
        )),
    }
}

// ---------------------------------------------------------------------------
// linkbudget
// ---------------------------------------------------------------------------

#[derive(Args)]
struct LinkbudgetArgs {
    /// Transmit power in dBm.
    #[arg(long, value_name = "DBM", allow_hyphen_values = true)]
    tx_power: f64,
    /// Transmit antenna gain in dBi.
    #[arg(long, value_name = "DBI", allow_hyphen_values = true)]
    tx_gain: f64,
    /// Receive antenna gain in dBi.
    #[arg(long, value_name = "DBI", allow_hyphen_values = true)]
    rx_gain: f64,
    /// Pathloss in dB.
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    pathloss: f64,
    /// Bandwidth in Hz.
    #[arg(long, value_name = "HZ")]
    bandwidth: f64,
    /// Receiver noise figure in dB.
    #[arg(long, value_name = "DB")]
    nf: f64,
    /// Noise reference temperature in kelvin.
    #[arg(long, value_name = "K", default_value_t = 290.0)]
    temperature: f64,
    /// Also print the maximum allowable pathloss at this minimum SNR (dB).
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    snr_min: Option<f64>,
}

fn cmd_linkbudget(args: LinkbudgetArgs) -> Result<(), Error> {
    let input = LinkBudgetInput {
        tx_power_dbm: args.tx_power,
        tx_gain_dbi: args.tx_gain,
        rx_gain_dbi: args.rx_gain,
        pathloss_db: args.pathloss,
        bandwidth_hz: args.bandwidth,
        noise_figure_db: args.nf,
        temperature_k: args.temperature,
    };
    let result = evaluate_link_budget(&input)?;
    println!("rx_power_dbm    {}", sig6(result.rx_power_dbm));
    println!("noise_power_dbm {}", sig6(result.noise_power_dbm));
    println!("snr_db          {}", sig6(result.snr_db));
    if let Some(snr_min) = args.snr_min {
        println!("mapl_db         {}", sig6(mapl_db(&input, snr_min)?));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// pathloss
// ---------------------------------------------------------------------------

#[derive(Args)]
struct PathlossArgs {
    /// Tuned band preset: 728 or 2500 MHz.
    #[arg(long, value_name = "MHZ")]
    band: Option<f64>,
    /// Config file supplying an [spm] section (overridden by --band).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Single evaluation distance in metres.
    #[arg(long, value_name = "M", conflicts_with = "sweep")]
    d: Option<f64>,
    /// Distance sweep start:stop:step in metres; emits CSV.
    #[arg(long, value_name = "RANGE")]
    sweep: Option<String>,
    /// Effective transmitter height in metres.
    #[arg(long, value_name = "M")]
    htx: f64,
    /// Receiver height in metres.
    #[arg(long, value_name = "M", default_value_t = 2.0)]
    hrx: f64,
    /// Treat the path as non-line-of-sight.
    #[arg(long)]
    nlos: bool,
    /// Diffraction loss in dB (NLOS paths).
    #[arg(long, value_name = "DB", default_value_t = 0.0)]
    ldiff: f64,
    /// Output CSV path for sweeps (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn cmd_pathloss(args: PathlossArgs) -> Result<(), Error> {
    let config = load_config(args.config.as_deref())?;
    let params = spm_from(args.band, &config)?;
    let ctx_at = |d: f64| PathContext {
        d_m: d,
        h_tx_m: args.htx,
        h_rx_m: args.hrx,
        is_los: !args.nlos,
        l_diff_db: if args.nlos { args.ldiff } else { 0.0 },
    };
    match (args.d, args.sweep) {
        (Some(d), None) => {
            let pl = spm_pathloss_db(&params, &ctx_at(d))?;
            println!("pathloss_db {}", sig6(pl));
            Ok(())
        }
        (None, Some(sweep)) => {
            let mut csv = String::from("d_m,pathloss_db\n");
            for d in parse_sweep(&sweep)? {
                let pl = spm_pathloss_db(&params, &ctx_at(d))?;
                csv.push_str(&format!("{},{}\n", sig6(d), sig6(pl)));
            }
            write_output(args.out.as_deref(), &csv)
        }
        _ => Err(Error::invalid("give exactly one of --d or --sweep")),
    }
}

// ---------------------------------------------------------------------------
// beamwidth
// ---------------------------------------------------------------------------

#[derive(Args)]
struct BeamwidthArgs {
    /// Peak antenna gain in dBi.
    #[arg(long, value_name = "DBI", allow_hyphen_values = true)]
    gain: f64,
    /// Beamwidth-gain constant X*eta in squared degrees.
    #[arg(long, value_name = "DEG2")]
    x_eta: Option<f64>,
}

fn cmd_beamwidth(args: BeamwidthArgs) -> Result<(), Error> {
    let model = match args.x_eta {
        Some(v) => BeamwidthModel::new(v)?,
        None => BeamwidthModel::default(),
    };
    println!(
        "beamwidth_deg {}",
        sig6(tallcell::link::beamwidth_from_gain(args.gain, &model))
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// lens
// ---------------------------------------------------------------------------

#[derive(Args)]
struct LensArgs {
    /// Gain in dBi: print the interpolated diameter in wavelengths.
    #[arg(long, value_name = "DBI", conflicts_with = "diameter_lambda")]
    gain: Option<f64>,
    /// Diameter in wavelengths: print the interpolated gain in dBi.
    #[arg(long, value_name = "WL")]
    diameter_lambda: Option<f64>,
    /// Optional gain-curve file: two columns `D_lambda gain_dbi`.
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,
    /// Print the radial permittivity at r metres from the centre.
    #[arg(long, value_name = "M")]
    permittivity_at: Option<f64>,
    /// Lens radius in metres (for --permittivity-at).
    #[arg(long, value_name = "M")]
    radius: Option<f64>,
}

fn cmd_lens(args: LensArgs) -> Result<(), Error> {
    let model = match &args.curve {
        Some(path) => {
            let curve = LensModel::curve_from_str(&fs::read_to_string(path)?)?;
            LensModel::new(args.radius.unwrap_or(1.251 / 2.0), curve)?
        }
        None => LensModel::standard(),
    };
    let mut produced = false;
    if let Some(d) = args.diameter_lambda {
        println!("gain_dbi {}", sig6(lens_gain_dbi(d, &model)?));
        produced = true;
    }
    if let Some(g) = args.gain {
        println!("diameter_lambda {}", sig6(lens_diameter_for_gain(g, &model)?));
        produced = true;
    }
    if let Some(r) = args.permittivity_at {
        let radius = args
            .radius
            .ok_or_else(|| Error::invalid("--permittivity-at needs --radius"))?;
        println!(
            "permittivity {}",
            sig6(tallcell::antenna::lens_permittivity(r, radius)?)
        );
        produced = true;
    }
    if !produced {
        return Err(Error::invalid(
            "give --gain, --diameter-lambda or --permittivity-at",
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// panel
// ---------------------------------------------------------------------------

#[derive(Args)]
struct PanelArgs {
    /// Vertical element count (with --nh: print the array gain).
    #[arg(long, requires = "nh", conflicts_with = "target_gain")]
    nv: Option<u32>,
    /// Horizontal element count.
    #[arg(long)]
    nh: Option<u32>,
    /// Target gain in dBi (inverse sizing mode).
    #[arg(long, value_name = "DBI")]
    target_gain: Option<f64>,
    /// Per-element gain in dBi.
    #[arg(long, value_name = "DBI", default_value_t = DEFAULT_ELEMENT_GAIN_DBI)]
    element_gain: f64,
    /// Desired n_v/n_h aspect ratio for sizing.
    #[arg(long, default_value_t = 9.3)]
    aspect: f64,
}

fn cmd_panel(args: PanelArgs) -> Result<(), Error> {
    match (args.nv, args.nh, args.target_gain) {
        (Some(nv), Some(nh), None) => {
            let array = PanelArray::new(nv, nh, args.element_gain, Orientation::Vertical)?;
            println!("gain_dbi {}", sig6(panel_gain_dbi(&array)));
            Ok(())
        }
        (None, None, Some(target)) => {
            let (nv, nh) = panel_elements_for_gain(target, args.element_gain, args.aspect)?;
            let array = PanelArray::new(nv, nh, args.element_gain, Orientation::Vertical)?;
            println!("n_v {nv}");
            println!("n_h {nh}");
            println!("gain_dbi {}", sig6(panel_gain_dbi(&array)));
            Ok(())
        }
        _ => Err(Error::invalid(
            "give either --nv with --nh, or --target-gain",
        )),
    }
}

// ---------------------------------------------------------------------------
// epa
// ---------------------------------------------------------------------------

#[derive(Args)]
struct EpaArgs {
    /// Comma-separated gain levels in dBi.
    #[arg(long, value_name = "LIST")]
    gains: String,
    /// Carrier frequency in MHz.
    #[arg(long, value_name = "MHZ")]
    freq: f64,
    /// Per-element gain in dBi.
    #[arg(long, value_name = "DBI", default_value_t = DEFAULT_ELEMENT_GAIN_DBI)]
    element_gain: f64,
    /// Desired n_v/n_h aspect ratio for panel sizing.
    #[arg(long, default_value_t = 9.3)]
    aspect: f64,
    /// Optional gain-curve file for the lens columns.
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,
    /// Check each vertical-panel EPA against this budget in square feet.
    #[arg(long, value_name = "FT2")]
    budget: Option<f64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn cmd_epa(args: EpaArgs) -> Result<(), Error> {
    let gains = parse_list(&args.gains)?;
    let lens = match &args.curve {
        Some(path) => LensModel::new(
            1.251 / 2.0,
            LensModel::curve_from_str(&fs::read_to_string(path)?)?,
        )?,
        None => LensModel::standard(),
    };
    let rows = epa_comparison_table(&gains, args.freq, args.element_gain, args.aspect, &lens)?;
    write_output(args.out.as_deref(), &epa_table_csv(&rows))?;
    if let Some(limit) = args.budget {
        let budget = EpaBudget::new(limit)?;
        for row in &rows {
            let result = tallcell::windload::EpaResult {
                area_m2: row.epa_vertical_ft2 / tallcell::windload::FT2_PER_M2,
                area_ft2: row.epa_vertical_ft2,
            };
            let (pass, margin) = check_epa(&result, &budget);
            eprintln!(
                "gain {} dBi vertical: {} (margin {} ft2)",
                sig6(row.gain_dbi),
                if pass { "pass" } else { "fail" },
                sig6(margin)
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CapacityArgs {
    /// Azimuth spread sigma in degrees.
    #[arg(long, value_name = "DEG", allow_hyphen_values = true)]
    sigma: f64,
    /// Per-sector bandwidth in Hz.
    #[arg(long, value_name = "HZ")]
    bandwidth: f64,
    /// Baseline total carrier-to-noise ratio in dB.
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    cnr: f64,
    /// Largest sector count to sweep.
    #[arg(long, value_name = "N")]
    nmax: usize,
    /// Output CSV path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn cmd_capacity(args: CapacityArgs) -> Result<(), Error> {
    let curve = capacity_vs_sectors(args.sigma, args.bandwidth, args.cnr, args.nmax)?;
    write_output(args.out.as_deref(), &curve.to_csv())
}

// ---------------------------------------------------------------------------
// heatmap
// ---------------------------------------------------------------------------

#[derive(Args)]
struct HeatmapArgs {
    /// Terrain raster (ESRI ASCII grid).
    #[arg(long, value_name = "FILE")]
    terrain: PathBuf,
    /// Run configuration with [site], [plan] and [spm] sections.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Output prefix: writes <prefix>.asc and, with --pgm, <prefix>.pgm.
    #[arg(long, value_name = "PREFIX")]
    out: PathBuf,
    /// Additionally render an 8-bit PGM image.
    #[arg(long)]
    pgm: bool,
    /// Report the covered area at this RSRP threshold in dBm.
    #[arg(long, value_name = "DBM", allow_hyphen_values = true)]
    threshold: Option<f64>,
}

fn cmd_heatmap(args: HeatmapArgs) -> Result<(), Error> {
    let grid = load_grid(fs::File::open(&args.terrain)?)?;
    let config = load_config(Some(&args.config))?;
    let site = config.build_site()?;
    let map = compute_rsrp_map(&grid, &site)?;

    let asc_path = args.out.with_extension("asc");
    let mut asc = Vec::new();
    save_rsrp_asc(&map, &mut asc)?;
    fs::write(&asc_path, &asc)?;
    println!("wrote {}", asc_path.display());

    if args.pgm {
        let pgm_path = args.out.with_extension("pgm");
        let mut pgm = Vec::new();
        save_rsrp_pgm(&map, &mut pgm)?;
        fs::write(&pgm_path, &pgm)?;
        println!("wrote {}", pgm_path.display());
    }

    if let Some((lo, hi)) = map.finite_range() {
        println!("rsrp_min_dbm {}", sig6(lo));
        println!("rsrp_max_dbm {}", sig6(hi));
    }
    if let Some(threshold) = args.threshold {
        let area = coverage_area_km2(&map, threshold);
        let total = map.values().iter().filter(|v| !v.is_nan()).count() as f64
            * map.cell_area_km2();
        println!("covered_area_km2 {}", sig6(area));
        if total > 0.0 {
            println!("covered_percent {}", sig6(100.0 * area / total));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// coverage-ratio
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CoverageRatioArgs {
    /// High-site RSRP raster (.asc).
    #[arg(long, value_name = "FILE")]
    sc: PathBuf,
    /// Baseline RSRP raster (.asc).
    #[arg(long, value_name = "FILE")]
    mc: PathBuf,
    /// Thresholds: comma list or start:stop:step, in dBm.
    #[arg(long, value_name = "LIST", default_value = "-120:-80:5", allow_hyphen_values = true)]
    thresholds: String,
    /// Output CSV path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn cmd_coverage_ratio(args: CoverageRatioArgs) -> Result<(), Error> {
    let sc = RsrpMap::from_grid(&load_grid(fs::File::open(&args.sc)?)?);
    let mc = RsrpMap::from_grid(&load_grid(fs::File::open(&args.mc)?)?);
    let thresholds = if args.thresholds.contains(':') {
        parse_sweep(&args.thresholds)?
    } else {
        parse_list(&args.thresholds)?
    };
    let rows = coverage_ratio_table(&sc, &mc, &thresholds)?;
    write_output(args.out.as_deref(), &ratio_table_csv(&rows))
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CalibrateArgs {
    /// Measurement CSV (see the measurement schema in the README).
    #[arg(long, value_name = "FILE")]
    measurements: PathBuf,
    /// Tuned band preset supplying the fixed-coefficient baseline.
    #[arg(long, value_name = "MHZ")]
    band: Option<f64>,
    /// Config file supplying an [spm] baseline (overridden by --band).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Comma-separated coefficients to fit (default: the standard tuning set).
    #[arg(long, value_name = "LIST")]
    free: Option<String>,
    /// Terrain raster for LOS/diffraction derivation.
    #[arg(long, value_name = "FILE")]
    terrain: Option<PathBuf>,
    /// Site position (grid frame) for distance/profile derivation.
    #[arg(long, value_name = "M", allow_hyphen_values = true)]
    site_x: Option<f64>,
    #[arg(long, value_name = "M", allow_hyphen_values = true)]
    site_y: Option<f64>,
    /// Tower height above ground for profile derivation, metres.
    #[arg(long, value_name = "M")]
    tower_height: Option<f64>,
    /// Link constants when the CSV carries raw rx_power_dbm.
    #[arg(long, value_name = "DBM", allow_hyphen_values = true)]
    tx_power: Option<f64>,
    #[arg(long, value_name = "DBI", allow_hyphen_values = true)]
    tx_gain: Option<f64>,
    #[arg(long, value_name = "DBI", allow_hyphen_values = true)]
    rx_gain: Option<f64>,
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<(), Error> {
    let (records, constants) = read_measurements(fs::File::open(&args.measurements)?)?;
    let baseline = match (args.band, &args.config) {
        (Some(_), _) | (None, Some(_)) => spm_from(args.band, &load_config(args.config.as_deref())?)?,
        (None, None) => {
            return Err(Error::invalid(
                "need --band or --config to supply the coefficient baseline",
            ))
        }
    };
    let mask = match &args.free {
        Some(list) => {
            let names: Vec<&str> = list.split(',').map(str::trim).collect();
            FreeMask::from_names(&names)?
        }
        None => FreeMask::default_tuning(),
    };

    let link = {
        let get = |flag: Option<f64>, key: &str| flag.or_else(|| constants.get(key).copied());
        let tx_power = get(args.tx_power, "tx_power_dbm");
        let tx_gain = get(args.tx_gain, "tx_gain_dbi");
        let rx_gain = get(args.rx_gain, "rx_gain_dbi");
        match (tx_power, tx_gain, rx_gain) {
            (Some(p), g, r) => Some(LinkConstants {
                tx_power_dbm: p,
                tx_gain_dbi: g.unwrap_or(0.0),
                rx_gain_dbi: r.unwrap_or(0.0),
            }),
            _ => None,
        }
    };
    let terrain = match &args.terrain {
        Some(path) => Some(load_grid(fs::File::open(path)?)?),
        None => None,
    };
    let ctx = ResolutionContext {
        site: args.site_x.zip(args.site_y),
        link,
        terrain: terrain.as_ref(),
        tower_height_m: args.tower_height,
    };
    let resolved = resolve_records(&records, &ctx)?;
    let fit = fit_spm(&resolved, &mask, &baseline)?;

    println!("n_points {}", fit.n_points);
    for (i, name) in COEFF_NAMES.iter().enumerate() {
        let value = match i {
            0 => fit.params.k1_los,
            1 => fit.params.k2_los,
            2 => fit.params.k1_nlos,
            3 => fit.params.k2_nlos,
            4 => fit.params.k3,
            5 => fit.params.k4,
            6 => fit.params.k5,
            7 => fit.params.k6,
            8 => fit.params.k7,
            9 => fit.params.k_clutter,
            10 => fit.params.f_clutter,
            _ => fit.params.k_hill_los,
        };
        let status = if fit.free.is_free(i) { "fitted" } else { "fixed" };
        println!("{name} {} {status}", sig6(value));
    }
    println!("mean_db {}", sig6(fit.stats.mean_db));
    println!("std_db {}", sig6(fit.stats.std_db));
    println!("rms_db {}", sig6(fit.stats.rms_db));
    if !fit.collinear.is_empty() {
        eprintln!(
            "warning: rank-deficient design; collinear columns: {}",
            fit.collinear.join(", ")
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// fit-sigma
// ---------------------------------------------------------------------------

#[derive(Args)]
struct FitSigmaArgs {
    /// CSV with header columns pl_db,sigma_deg.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
}

fn cmd_fit_sigma(args: FitSigmaArgs) -> Result<(), Error> {
    let text = fs::read_to_string(&args.input)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() || l.trim_start().starts_with('#') => continue,
            Some((_, l)) => break l,
            None => return Err(Error::invalid("empty input")),
        }
    };
    let cols: Vec<String> = header
        .split(',')
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    let ix = cols
        .iter()
        .position(|c| c == "pl_db")
        .ok_or_else(|| Error::invalid("missing pl_db column"))?;
    let iy = cols
        .iter()
        .position(|c| c == "sigma_deg")
        .ok_or_else(|| Error::invalid("missing sigma_deg column"))?;
    for (n, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::parse(n + 1, "wrong field count"));
        }
        let parse = |i: usize| -> Result<f64, Error> {
            fields[i]
                .parse()
                .map_err(|_| Error::parse(n + 1, format!("bad number: {}", fields[i])))
        };
        xs.push(parse(ix)?);
        ys.push(parse(iy)?);
    }
    let (a, b) = fit_exponential(&xs, &ys)?;
    println!("a {}", sig6(a));
    println!("b {}", sig6(b));
    Ok(())
}
