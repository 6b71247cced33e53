use clap::{Args, ValueEnum};
use serde_json::{json, Map, Value};
use sparc_core::chi2::chi2_upper_tail;
use sparc_core::chi2::TailProbability;
use sparc_core::theory::{
    b_min, c1_const, critical_ratio, delta_alpha_bound, eta_xi, gaussian_ld_rate, h_alpha, lambda_alpha,
    opt_error_exponent, rate_fn_f, rate_fn_f_oracle, shannon_rates, solve_d_alpha, stylized_cond_dist, stylized_ratio,
    stylized_regime, suen_sparc_terms, theory_panel, EtaXi,
};
use sparc_core::{Error, OverlapFraction, RateFnArgs, StylizedParams, TheoryPoint};

use crate::{announce, print_json, Globals};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryOp {
    /// Rate function f(x, y, z)
    F,
    /// f(x, y, z) by direct Chernoff optimization
    FOracle,
    /// Critical ratio x* where R*(D) and R0(D) meet
    Xstar,
    /// R*(D) and R0(D) for (sigma2, D)
    Shannon,
    /// Optimal excess-distortion exponent r*(D, R)
    Exponent,
    /// Gaussian large-deviation rate at threshold t
    LdRate,
    /// h(alpha) at a theory point
    HAlpha,
    /// D_alpha at a theory point
    DAlpha,
    /// Lambda(alpha) at a theory point
    Lambda,
    /// Smallest admissible section exponent b_min(x, R)
    BMin,
    /// The constant c1 at a theory point
    C1,
    /// eta at (L, b, x = rho2/D, R)
    Eta,
    /// xi at (L, b, x = rho2/D, R)
    Xi,
    /// Upper bound on Delta_alpha for alpha = overlap/L
    DeltaAlpha,
    /// lambda/Delta and lambda^2/(8 Delta) for SPARC dependency graphs
    Suen,
    /// Stylized second-moment ratio E X^2 / (E X)^2
    StylizedRatio,
    /// Stylized conditional distribution of X given U1 = 1
    StylizedCond,
    /// Stylized regime classifier (cases 1/2/3)
    Regime,
    /// Chi-square upper tail P(chi2_dof >= t)
    Chi2Tail,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Quantity to evaluate
    #[arg(long, value_enum, required_unless_present = "all")]
    pub op: Option<TheoryOp>,
    /// Emit every closed-form quantity for the theory point
    #[arg(long, conflicts_with = "op")]
    pub all: bool,
    /// First argument of f (source power)
    #[arg(long)]
    pub x: Option<f64>,
    /// Second argument of f (codeword variance)
    #[arg(long)]
    pub y: Option<f64>,
    /// Third argument of f (distortion)
    #[arg(long)]
    pub z: Option<f64>,
    /// Source variance
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Target distortion D
    #[arg(long)]
    pub d: Option<f64>,
    /// Rate R in nats per sample
    #[arg(long)]
    pub r: Option<f64>,
    /// Squared norm rho2 of the rescaled source (defaults to sigma2)
    #[arg(long)]
    pub rho2: Option<f64>,
    /// Norm ceiling gamma2 (defaults to just above sigma2)
    #[arg(long)]
    pub gamma2: Option<f64>,
    /// Overlap fraction alpha in [0, 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Overlap count r for delta-alpha (alpha = overlap/sections)
    #[arg(long)]
    pub overlap: Option<u32>,
    /// Number of sections L
    #[arg(long)]
    pub sections: Option<u32>,
    /// Section exponent b (M = L^b)
    #[arg(long)]
    pub b: Option<f64>,
    /// Caller-supplied constant for bounds with an unspecified prefactor
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Stylized model size n
    #[arg(long)]
    pub n: Option<f64>,
    /// Stylized model exponent p
    #[arg(long)]
    pub p: Option<f64>,
    /// Threshold t (ld-rate, chi2-tail)
    #[arg(long)]
    pub t: Option<f64>,
    /// Degrees of freedom (chi2-tail)
    #[arg(long)]
    pub dof: Option<u32>,
}

fn need<T: Copy>(value: Option<T>, flag: &str, op: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::Config(vec![format!("--{flag} is required for {op}")]))
}

impl TheoryArgs {
    fn inputs(&self) -> Value {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("x", self.x.map(Value::from));
        put("y", self.y.map(Value::from));
        put("z", self.z.map(Value::from));
        put("sigma2", Some(self.sigma2.into()));
        put("D", self.d.map(Value::from));
        put("R", self.r.map(Value::from));
        put("rho2", self.rho2.map(Value::from));
        put("gamma2", self.gamma2.map(Value::from));
        put("alpha", self.alpha.map(Value::from));
        put("overlap", self.overlap.map(Value::from));
        put("L", self.sections.map(Value::from));
        put("b", self.b.map(Value::from));
        put("kappa", Some(self.kappa.into()));
        put("n", self.n.map(Value::from));
        put("p", self.p.map(Value::from));
        put("t", self.t.map(Value::from));
        put("dof", self.dof.map(Value::from));
        Value::Object(m)
    }

    fn point(&self, op: &str) -> Result<TheoryPoint, Error> {
        let rho2 = self.rho2.unwrap_or(self.sigma2);
        let gamma2 = self.gamma2.unwrap_or(self.sigma2 * (1.0 + 1e-9) + 1e-12);
        TheoryPoint::new(self.sigma2, need(self.d, "d", op)?, need(self.r, "r", op)?, rho2, gamma2)
    }

    fn stylized(&self, op: &str) -> Result<StylizedParams, Error> {
        StylizedParams::new(need(self.n, "n", op)?, need(self.p, "p", op)?)
    }
}

fn evaluate(op: TheoryOp, a: &TheoryArgs, g: &Globals) -> Result<Value, Error> {
    let name = op.to_possible_value().expect("named").get_name().to_string();
    let name = name.as_str();
    Ok(match op {
        TheoryOp::F | TheoryOp::FOracle => {
            let args = RateFnArgs::new(need(a.x, "x", name)?, need(a.y, "y", name)?, need(a.z, "z", name)?)?;
            let v = if op == TheoryOp::F { rate_fn_f(args)? } else { rate_fn_f_oracle(args)? };
            g.rate(v).into()
        }
        TheoryOp::Xstar => critical_ratio().into(),
        TheoryOp::Shannon => {
            let rates = shannon_rates(a.sigma2, need(a.d, "d", name)?)?;
            json!({"R_star": g.rate(rates.r_star), "R0": g.rate(rates.r0), "gap": g.rate(rates.gap())})
        }
        TheoryOp::Exponent => {
            g.rate(opt_error_exponent(a.sigma2, need(a.d, "d", name)?, need(a.r, "r", name)?)?).into()
        }
        TheoryOp::LdRate => g.rate(gaussian_ld_rate(a.sigma2, need(a.t, "t", name)?)?).into(),
        TheoryOp::HAlpha => h_alpha(need(a.alpha, "alpha", name)?, &a.point(name)?)?.into(),
        TheoryOp::DAlpha => solve_d_alpha(need(a.alpha, "alpha", name)?, &a.point(name)?)?.into(),
        TheoryOp::Lambda => lambda_alpha(need(a.alpha, "alpha", name)?, &a.point(name)?)?.into(),
        TheoryOp::BMin => {
            let point = a.point(name)?;
            b_min(point.rho2 / point.d, point.r)?.into()
        }
        TheoryOp::C1 => c1_const(&a.point(name)?)?.into(),
        TheoryOp::Eta | TheoryOp::Xi => {
            let point = a.point(name)?;
            let mode = if op == TheoryOp::Eta { EtaXi::Eta } else { EtaXi::Xi };
            let l = need(a.sections, "sections", name)?;
            eta_xi(l as f64, need(a.b, "b", name)?, point.rho2 / point.d, point.r, mode)?.into()
        }
        TheoryOp::DeltaAlpha => {
            let frac = OverlapFraction::new(need(a.overlap, "overlap", name)?, need(a.sections, "sections", name)?)?;
            delta_alpha_bound(frac, &a.point(name)?, need(a.b, "b", name)?, a.kappa)?.into()
        }
        TheoryOp::Suen => {
            let point = a.point(name)?;
            let l = need(a.sections, "sections", name)?;
            let b = need(a.b, "b", name)?;
            let xi = eta_xi(l as f64, b, point.rho2 / point.d, point.r, EtaXi::Xi)?;
            serde_json::to_value(suen_sparc_terms(l as u64, b, xi)?)?
        }
        TheoryOp::StylizedRatio => stylized_ratio(&a.stylized(name)?).into(),
        TheoryOp::StylizedCond => serde_json::to_value(stylized_cond_dist(&a.stylized(name)?))?,
        TheoryOp::Regime => {
            let regime = stylized_regime(need(a.p, "p", name)?);
            json!({"regime": regime, "case": regime.case_number()})
        }
        TheoryOp::Chi2Tail => match chi2_upper_tail(need(a.dof, "dof", name)?, need(a.t, "t", name)?)? {
            TailProbability::Prob(p) => json!({"probability": p, "ln_probability": p.ln()}),
            TailProbability::Log(lp) => json!({"probability": null, "ln_probability": lp}),
        },
    })
}

pub fn run(args: &TheoryArgs, g: &Globals) -> Result<(), Error> {
    let inputs = args.inputs();
    let op_name = match args.op {
        Some(op) => op.to_possible_value().expect("named").get_name().to_string(),
        None => "all".to_string(),
    };
    announce("theory", &json!({"op": op_name, "inputs": inputs, "units": g.units(), "seed": g.seed}));
    let value = match args.op {
        Some(op) => evaluate(op, args, g)?,
        None => {
            let point = args.point("all")?;
            let panel = theory_panel(&point, need(args.sections, "sections", "all")?, need(args.b, "b", "all")?)?;
            let mut v = serde_json::to_value(&panel)?;
            for key in ["r_star", "r0", "error_exponent", "lambda0"] {
                if let Some(x) = v.get(key).and_then(Value::as_f64) {
                    v[key] = g.rate(x).into();
                }
            }
            v
        }
    };
    print_json(&json!({"op": op_name, "inputs": inputs, "units": g.units(), "value": value}))
}
