//! Fixtures shared by the benchmarks: the bundled feedback pair and
//! per-frequency separation queries at a given phase resolution.

use srg_cert::ratfun::{bundled_model, Model};
use srg_cert::separation::{FrequencyTester, Method, SeparationQuery, SweepConfig, TauSweep};
use srg_cert::srg::{disk_of_points, SamplerConfig, SrgRegion, DISK_INFLATION};
use srg_cert::Result;

/// Frequencies at which the per-frequency check is timed.
pub const OMEGAS: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

/// The bundled `h1`/`h2` pair.
pub fn bundled_pair() -> (Model, Model) {
    (
        Model::from_rational(bundled_model("h1").expect("bundled h1")),
        Model::from_rational(bundled_model("h2").expect("bundled h2")),
    )
}

/// One query per frequency in [`OMEGAS`], sampled with `4 * n_phi` directions
/// and reduced to `n_phi` phase bins.
pub fn queries(h1: &Model, h2: &Model, n_phi: usize, method: Method) -> Result<Vec<SeparationQuery>> {
    use srg_cert::ratfun::LtiModel;
    let sweep = SweepConfig {
        n_phase_bins: n_phi,
        sampler: SamplerConfig::with_n_dir(4 * n_phi),
        ..SweepConfig::default()
    };
    let tester = FrequencyTester::new(h1.dim(), &sweep);
    let mut out = Vec::new();
    for w in OMEGAS {
        let Some((a, b)) = tester.prepare(&h1.response(w)?, &h2.response(w)?, w)? else {
            continue;
        };
        let (region_a, region_b) = match method {
            Method::Disk => (disk_of_points(&a, DISK_INFLATION), disk_of_points(&b, DISK_INFLATION)),
            _ => (SrgRegion::Points { points: a }, SrgRegion::Points { points: b }),
        };
        out.push(SeparationQuery {
            omega: w,
            region_a,
            region_b,
            tau: TauSweep::Continuous,
            method,
        });
    }
    Ok(out)
}
