use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sparc_core::census::{
    bucket_table_csv, expected_solutions_bounds, is_eps_good, solution_census, ExRefSource, SolutionCensus,
};
use sparc_core::experiments::draw_source;
use sparc_core::sparc::io::{read_samples, write_samples};
use sparc_core::sparc::{
    decode, derive_dimensions, encode_with_trace, mean_square_distance, payload_bits, quantizer_level, CodecSettings,
    EncodeTrace,
};
use sparc_core::{DesignMatrix, EncodeOutcome, EncodeStatus, Error, SparcParams, TheoryPoint};

use crate::{announce, print_json, Globals};

/// Where the source block comes from.
#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Source block file (raw little-endian f64, or CSV by extension)
    #[arg(long, value_name = "PATH", conflicts_with = "generate")]
    pub source: Option<PathBuf>,
    /// Draw an i.i.d. N(0, SIGMA2) block of N samples from SEED instead
    #[arg(long, num_args = 3, value_names = ["N", "SIGMA2", "SEED"])]
    pub generate: Option<Vec<String>>,
}

/// Code geometry: either (L, M) directly or (R, b) with M = L^b.
#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Block length (defaults to the source length)
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of sections L
    #[arg(long, requires = "columns")]
    pub sections: Option<usize>,
    /// Columns per section M
    #[arg(long, requires = "sections")]
    pub columns: Option<usize>,
    /// Nominal rate R in nats per sample (with --b)
    #[arg(long, conflicts_with_all = ["sections", "columns"], requires = "b")]
    pub rate: Option<f64>,
    /// Section exponent b (with --rate)
    #[arg(long, requires = "rate")]
    pub b: Option<f64>,
}

/// Target distortion and norm ceiling.
#[derive(Debug, Args)]
pub struct DistortionArgs {
    /// Target distortion D
    #[arg(long)]
    pub d: f64,
    /// Norm ceiling gamma2; blocks with |S|^2 >= gamma2 overflow
    #[arg(long)]
    pub gamma2: f64,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub distortion: DistortionArgs,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Encoded block written by `sparc encode`
    #[arg(long, value_name = "PATH")]
    pub outcome: PathBuf,
    /// Original source, to report the realized distortion
    #[arg(long, value_name = "PATH")]
    pub source: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub distortion: DistortionArgs,
    /// Threshold eps of the eps-good test
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Reference value of E X (defaults to the theory upper bound)
    #[arg(long)]
    pub ex_ref: Option<f64>,
}

/// Everything a decoder needs: the outcome plus the code it was made with.
#[derive(Debug, Serialize, Deserialize)]
pub struct EncodedBlock {
    #[serde(flatten)]
    pub outcome: EncodeOutcome,
    pub n: usize,
    #[serde(rename = "L")]
    pub sections: usize,
    #[serde(rename = "M")]
    pub columns: usize,
    pub seed: u64,
    #[serde(rename = "D")]
    pub d: f64,
    pub gamma2: f64,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(vec![msg.into()])
}

impl SourceArgs {
    fn load(&self) -> Result<(Vec<f64>, Value), Error> {
        match (&self.source, &self.generate) {
            (Some(path), None) => Ok((read_samples(path)?, json!({"path": path}))),
            (None, Some(v)) => {
                let n: usize = v[0].parse().map_err(|e| config_error(format!("--generate N {:?}: {e}", v[0])))?;
                let sigma2: f64 =
                    v[1].parse().map_err(|e| config_error(format!("--generate SIGMA2 {:?}: {e}", v[1])))?;
                let seed: u64 = v[2].parse().map_err(|e| config_error(format!("--generate SEED {:?}: {e}", v[2])))?;
                if n == 0 || !(sigma2 > 0.0 && sigma2.is_finite()) {
                    return Err(config_error("--generate needs N >= 1 and SIGMA2 > 0"));
                }
                Ok((draw_source(seed, n, sigma2), json!({"generate": {"n": n, "sigma2": sigma2, "seed": seed}})))
            }
            _ => Err(config_error("one of --source or --generate is required")),
        }
    }
}

impl GeometryArgs {
    fn resolve(&self, source_len: usize) -> Result<SparcParams, Error> {
        let n = self.n.unwrap_or(source_len);
        match (self.sections, self.columns, self.rate, self.b) {
            (Some(l), Some(m), None, None) => SparcParams::from_geometry(n, l, m),
            (None, None, Some(r), Some(b)) => derive_dimensions(n, r, b),
            _ => Err(config_error("give either --sections and --columns, or --rate and --b")),
        }
    }
}

struct Prepared {
    params: SparcParams,
    matrix: DesignMatrix,
    settings: CodecSettings,
    trace: EncodeTrace,
}

fn prepare(
    subcommand: &str,
    source: &SourceArgs,
    geometry: &GeometryArgs,
    distortion: &DistortionArgs,
    g: &Globals,
    extra: Value,
) -> Result<Prepared, Error> {
    let (samples, origin) = source.load()?;
    let params = geometry.resolve(samples.len())?;
    let settings = CodecSettings::new(distortion.d, distortion.gamma2)?.with_budget(g.budget);
    let mut resolved = json!({
        "source": origin,
        "n": params.n,
        "L": params.sections,
        "M": params.columns,
        "R_actual": g.rate(params.rate_actual),
        "D": settings.d,
        "gamma2": settings.gamma2,
        "budget": settings.budget,
        "seed": g.seed,
    });
    if let (Value::Object(r), Value::Object(e)) = (&mut resolved, extra) {
        r.extend(e);
    }
    announce(subcommand, &resolved);
    let matrix = DesignMatrix::sample(&params, g.seed)?;
    let trace = encode_with_trace(&samples, &matrix, &params, &settings)?;
    Ok(Prepared { params, matrix, settings, trace })
}

pub fn run_encode(args: &EncodeArgs, g: &Globals) -> Result<(), Error> {
    let p = prepare("encode", &args.source, &args.geometry, &args.distortion, g, json!({}))?;
    let outcome = p.trace.outcome.clone();
    let bits = payload_bits(&p.params, outcome.status);
    let block = EncodedBlock {
        outcome: outcome.clone(),
        n: p.params.n,
        sections: p.params.sections,
        columns: p.params.columns,
        seed: g.seed,
        d: p.settings.d,
        gamma2: p.settings.gamma2,
    };
    if let Some(path) = &g.out {
        fs::write(path, serde_json::to_vec_pretty(&block)?)?;
    }
    print_json(&json!({
        "status": outcome.status,
        "q_index": outcome.q_index,
        "beta_hat": outcome.beta_hat,
        "coeff": outcome.coeff,
        "source_norm2": p.trace.source_norm2,
        "distortion_tilde": outcome.distortion_tilde,
        "distortion_total": outcome.distortion_total,
        "payload_bits": bits,
        "R_nominal": g.rate(p.params.rate_nominal),
        "R_actual": g.rate(p.params.rate_actual),
        "units": g.units(),
        "outcome_path": g.out,
    }))
}

pub fn run_decode(args: &DecodeArgs, g: &Globals) -> Result<(), Error> {
    let block: EncodedBlock = serde_json::from_slice(&fs::read(&args.outcome)?)?;
    announce(
        "decode",
        &json!({
            "outcome": args.outcome,
            "n": block.n,
            "L": block.sections,
            "M": block.columns,
            "D": block.d,
            "gamma2": block.gamma2,
            "seed": block.seed,
        }),
    );
    let params = SparcParams::from_geometry(block.n, block.sections, block.columns)?;
    let settings = CodecSettings::new(block.d, block.gamma2)?.with_budget(g.budget);
    let matrix = DesignMatrix::sample(&params, block.seed)?;
    let reconstruction = decode(&block.outcome, &matrix, &params, &settings)?;
    if let Some(path) = &g.out {
        write_samples(path, &reconstruction)?;
    }
    let distortion = match &args.source {
        Some(path) => {
            let source = read_samples(path)?;
            if source.len() != reconstruction.len() {
                return Err(Error::Geometry(format!(
                    "source has {} samples, block length is {}",
                    source.len(),
                    reconstruction.len()
                )));
            }
            Some(mean_square_distance(&source, &reconstruction))
        }
        None => None,
    };
    print_json(&json!({
        "status": block.outcome.status,
        "n": reconstruction.len(),
        "distortion_total": distortion,
        "reconstruction_path": g.out,
        "reconstruction": if g.out.is_none() { Some(&reconstruction) } else { None },
    }))
}

pub fn run_census(args: &CensusArgs, g: &Globals) -> Result<(), Error> {
    let extra = json!({"eps": args.eps, "EX_ref": args.ex_ref});
    let p = prepare("census", &args.source, &args.geometry, &args.distortion, g, extra)?;
    let outcome = &p.trace.outcome;
    let (beta, s_tilde, q_index) = match (&outcome.beta_hat, &p.trace.s_tilde, outcome.q_index) {
        (Some(b), Some(s), Some(q)) if outcome.status == EncodeStatus::Coded => (b, s, q),
        _ => {
            return Err(Error::Domain(format!(
                "a census needs a coded block; the encoder returned {}",
                outcome.status.as_str()
            )))
        }
    };
    let q = quantizer_level(q_index, p.settings.d, p.settings.gamma2, p.params.n);
    let point = TheoryPoint::conditional(q, p.settings.d, p.params.rate_actual)?;
    let bounds = expected_solutions_bounds(&point, p.params.n, 1.0)?;
    let ex_ref = match args.ex_ref {
        Some(v) => (v, ExRefSource::Supplied),
        None => (bounds.ln_upper.exp(), ExRefSource::TheoryUpperBound),
    };
    let census: SolutionCensus =
        solution_census(s_tilde, &p.matrix, p.settings.d, outcome.coeff, beta, ex_ref, p.settings.budget)?;
    let eps_good = is_eps_good(&census, args.eps)?;
    if let Some(path) = &g.out {
        fs::write(path, bucket_table_csv(&census, p.params.columns as u64)?)?;
    }
    print_json(&json!({
        "census": census,
        "eps": args.eps,
        "eps_good": eps_good,
        "ln_EX_bounds": bounds,
        "distortion_tilde": outcome.distortion_tilde,
        "bucket_table_path": g.out,
    }))
}
