use serde_json::json;

use circdeconv::classes::{default_k_max, diagnostic_bounds, rate_oracle, rate_prediction, ClassSpec, SmoothnessCase};
use circdeconv::selection::{known_tables, upper_dimension};
use circdeconv::WeightSequence;

use crate::args::OracleArgs;
use crate::failure::{Failure, USAGE};

fn invalid(e: circdeconv::Error) -> Failure {
    Failure::new(USAGE, e)
}

pub fn run(a: &OracleArgs) -> Result<(), Failure> {
    let case = SmoothnessCase::from(a.family);
    let gamma = WeightSequence::sobolev(a.p).map_err(invalid)?;
    let lambda = match case {
        SmoothnessCase::Os => WeightSequence::ordinary_smooth(a.a),
        SmoothnessCase::Ss => WeightSequence::super_smooth(a.a),
    }
    .map_err(invalid)?;
    let omega = WeightSequence::derivative(a.s).map_err(invalid)?;
    let cls = ClassSpec::new(gamma, lambda, omega, a.r, a.d).map_err(invalid)?;
    log::info!(
        "class: p = {}, {:?} a = {}, s = {}, d = {}, r = {}; n = {}, m = {}",
        a.p, case, a.a, a.s, a.d, a.r, a.n, a.m
    );

    let k_max = a.k_max.unwrap_or_else(|| default_k_max(a.n));
    let rates = rate_oracle(&cls, a.n, a.m, k_max).map_err(invalid)?;
    let tables = known_tables(&cls.omega, &cls.lambda, cls.d, a.n, a.m, false).map_err(invalid)?;
    let diag = diagnostic_bounds(&cls, a.n, a.m, tables.n_bound, tables.m_bound);
    let predicted = rate_prediction(case, a.p, a.a, a.s, a.n, a.m).ok();

    let report = json!({
        "n": rates.n,
        "m": rates.m,
        "psi_n": rates.psi_n,
        "k_star": rates.k_star,
        "kappa_m": rates.kappa_m,
        "kappa_argmax": rates.kappa_argmax,
        "balance_ratio": rates.balance_ratio,
        "n_bound": tables.n_bound,
        "m_bound": tables.m_bound,
        "n_lower": diag.n_lower,
        "m_lower": diag.m_lower,
        "n_upper": upper_dimension(&cls.omega, a.n),
        "zeta_d": diag.zeta_d,
        "assumption_ok": tables.assumption_ok,
        "predicted_rate": predicted,
    });
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Failure::new(USAGE, e))?);
    Ok(())
}
