//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs sequentially so the runtime limits are measured in isolation.
//! Exits nonzero on any failing check except those listed as known gaps.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geopoly::asymptotics::{exterior_ratio, fubini_limit, interior_compare, interior_grid};
use geopoly::distribution::{
    cdf_derivative_max_rel_err, compare_stieltjes, distance_to_segment, kolmogorov_distance,
    log_potential, stieltjes_sample_points, DensityModel,
};
use geopoly::dyadic::Dyadic;
use geopoly::hp::{to_f64, Hp};
use geopoly::poly::{
    check_logderiv_identity, check_symmetry, factorial, fubini_number, gen_derivative,
    gen_recurrence, gen_stirling, GeometricPolynomial,
};
use geopoly::roots::{verify_interlace, ZeroTower};
use geopoly::weights::{
    compute_weights, even_power_configs, integral_pn_over_x, mixed_pair_configs,
    parity_product_integral, partial_fraction_check, weight_interval_sum,
};
use geopoly::Error;

struct Check {
    label: &'static str,
    ok: bool,
    detail: String,
    known_gap: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, label: &'static str, ok: bool, detail: impl Into<String>) {
        self.0.push(Check {
            label,
            ok,
            detail: detail.into(),
            known_gap: false,
        });
    }

    /// A sub-claim shown to be unattainable; reported but not fatal.
    fn add_known_gap(&mut self, label: &'static str, ok: bool, detail: impl Into<String>) {
        self.0.push(Check {
            label,
            ok,
            detail: detail.into(),
            known_gap: true,
        });
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn width() -> BigRational {
    Dyadic::pow2_neg(80).to_rational()
}

fn poly_from(c: &[i64]) -> Vec<BigInt> {
    c.iter().map(|&v| BigInt::from(v)).collect()
}

fn c1_ground_truth(c: &mut Checks, _: &Shared) {
    // displayed table, coefficients of x^1..x^n
    let table: [&[i64]; 7] = [
        &[],
        &[1],
        &[1, 2],
        &[1, 6, 6],
        &[1, 14, 36, 24],
        &[1, 30, 150, 240, 120],
        &[1, 62, 540, 1560, 1800, 720],
    ];
    let ps = gen_recurrence(6);
    let ok = ps
        .iter()
        .zip(table)
        .all(|(p, t)| p.coeffs() == poly_from(t).as_slice());
    c.add("P_0..P_6 table", ok, "");
    c.add("P_0 = 1", ps[0].dense() == vec![BigInt::one()], "");
}

fn c2_generators(c: &mut Checks, _: &Shared) {
    let r = gen_recurrence(50);
    c.add("recurrence = stirling", r == gen_stirling(50), "n <= 50");
    c.add("recurrence = derivative", r == gen_derivative(50), "n <= 50");
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.gen_range(-3000..3000), rng.gen_range(1..500))
}

fn c3_invariants(c: &mut Checks, s: &Shared) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut top, mut low, mut minus_one, mut sym, mut logd) = (true, true, true, true, true);
    for p in &s.polys[1..=100] {
        let n = p.degree();
        top &= p.coeff(n) == factorial(n);
        low &= p.coeff(1) == BigInt::one();
        let expect = if n % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        minus_one &= p.eval_exact(&-BigRational::one()) == expect;
        for _ in 0..20 {
            sym &= check_symmetry(p, &random_rational(&mut rng)).unwrap();
        }
        let mut done = 0;
        while done < 20 {
            match check_logderiv_identity(p, &random_rational(&mut rng)) {
                Ok(ok) => {
                    logd &= ok;
                    done += 1;
                }
                Err(Error::DomainViolation(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
    c.add("c_n = n!", top, "");
    c.add("c_1 = 1", low, "");
    c.add("P_n(-1) = (-1)^n", minus_one, "");
    c.add("symmetry at 20 rationals", sym, "n <= 100");
    c.add("log-derivative at 20 rationals", logd, "n <= 100");
}

fn c4_zeros(c: &mut Checks, s: &Shared) {
    let t = &s.tower;
    let w = width();
    let (mut count, mut simple, mut paired, mut interlace) = (true, true, true, true);
    for n in 0..=200 {
        let zs = t.zeros(n);
        count &= zs.len() == n;
        simple &= zs.verify_certificates(t.poly(n));
        let e = zs.enclosures();
        for (a, b) in e.iter().zip(e.iter().rev()) {
            let gap = a.midpoint().to_rational() + b.midpoint().to_rational() + BigRational::one();
            paired &= gap.abs() <= &w * BigInt::from(2);
        }
        if n >= 1 {
            interlace &= verify_interlace(zs, t.zeros(n - 1)).unwrap();
        }
    }
    c.add("n zeros in (-1, 0]", count, "n <= 200");
    c.add("simple (strict sign changes)", simple, "");
    c.add("symmetric pairing within 2 width", paired, "");
    c.add("interlacing", interlace, "every consecutive pair");
}

fn c5_orthogonality(c: &mut Checks, s: &Shared) {
    let ort = (2..=40).all(|n| integral_pn_over_x(&s.polys[n]).unwrap().is_zero());
    c.add("integral of P_n/x vanishes", ort, "2 <= n <= 40");
    let even = even_power_configs(10, 3);
    let mixed = mixed_pair_configs(10);
    let zero = |f: &[(usize, u32)]| parity_product_integral(&s.polys, f).unwrap().value.is_zero();
    c.add("statement 1 configurations", even.iter().all(|f| zero(f)), format!("{} configs", even.len()));
    c.add("statement 2 pairs", mixed.iter().all(|f| zero(f)), format!("{} pairs", mixed.len()));
}

fn c6_stieltjes(c: &mut Checks, _: &Shared) {
    let model = DensityModel::default();
    let pts = stieltjes_sample_points();
    let worst = pts
        .iter()
        .map(|&z| compare_stieltjes(&model, z).unwrap().err)
        .fold(0.0, f64::max);
    let (pos, neg, upper, lower) = (
        pts.iter().any(|z| z.im == 0.0 && z.re > 0.0),
        pts.iter().any(|z| z.im == 0.0 && z.re < -1.0),
        pts.iter().any(|z| z.im > 0.0),
        pts.iter().any(|z| z.im < 0.0),
    );
    c.add("sample coverage", pts.len() == 12 && pos && neg && upper && lower, "");
    c.add("|lhs - rhs| < 1e-8", worst < 1e-8, format!("max {worst:.2e}"));
}

fn c7_density(c: &mut Checks, _: &Shared) {
    let mass = DensityModel::default().density_mass().unwrap();
    let dev = (mass.value.re - 1.0).abs();
    c.add("mass within 1e-10 of 1", dev <= 1e-10, format!("{dev:.2e}"));
    let grid: Vec<f64> = (0..=90).map(|i| -0.95 + 0.01 * i as f64).collect();
    let rel = cdf_derivative_max_rel_err(&grid, 1e-6).unwrap();
    c.add("cdf' = density to 1e-6", rel <= 1e-6, format!("{rel:.2e}"));
}

fn c8_exterior(c: &mut Checks, s: &Shared) {
    let mut hp = Hp::new(256).unwrap();
    // frozen first-run errors at n = 20 and n = 60
    let cases = [
        (Complex64::new(1.0, 0.0), 5.129708226734287e-21, 1.1237724588214173e-59),
        (Complex64::new(2.0, 0.0), 6.307387506106522e-26, 1.036858396724639e-73),
        (Complex64::new(-3.0, 0.0), 9.461081259159782e-26, 9.306374961675058e-71),
        (Complex64::new(1.0, 1.0), 1.2553578260127942e-22, 8.104987557413998e-64),
    ];
    let (mut shrinks, mut frozen) = (true, true);
    for (z, b20, b60) in cases {
        let e20 = exterior_ratio(&s.polys[20], z, &mut hp).unwrap().abs_err;
        let e60 = exterior_ratio(&s.polys[60], z, &mut hp).unwrap().abs_err;
        shrinks &= e60 < e20;
        frozen &= close(e20, b20, 1e-6) && close(e60, b60, 1e-6);
    }
    c.add("error(60) < error(20)", shrinks, "z in {1, 2, -3, 1+i}");
    c.add("regression baselines", frozen, "");
    let v = exterior_ratio(&s.polys[5], Complex64::new(1.0, 0.0), &mut hp)
        .unwrap()
        .computed_c64()
        .re;
    c.add("z = 1, n = 5 anchor", (v - 0.5).abs() <= 0.001, format!("{v:.7}"));
}

fn c9_interior(c: &mut Checks, s: &Shared) {
    let mut hp = Hp::new(256).unwrap();
    let grid = interior_grid(50);
    let mut devs = Vec::new();
    let mut bounded = true;
    for n in [10, 20, 40] {
        let mut worst = 0.0f64;
        for x in &grid {
            let sm = interior_compare(&s.polys[n], x, &mut hp).unwrap();
            worst = worst.max(sm.abs_err);
            bounded &= sm.predicted_c64().re.abs() <= 2.0 + 1e-60;
        }
        devs.push(worst);
    }
    c.add("max deviation decreases", strictly_decreasing(&devs), sci(&devs));
    let frozen = [4.428587903869178e-5, 7.14409992635506e-9, 1.8355261249770497e-17];
    c.add(
        "regression baselines",
        devs.iter().zip(frozen).all(|(&d, b)| close(d, b, 1e-6)),
        "",
    );
    c.add("|G_n| <= 2 on the grid", bounded, "");
    let mut centre = true;
    for n in 1..=40 {
        let g = to_f64(&interior_compare(&s.polys[n], &rat(-1, 2), &mut hp).unwrap().predicted.re);
        centre &= if n % 2 == 0 { g.abs() < 1e-60 } else { (g.abs() - 2.0).abs() < 1e-60 };
    }
    c.add("G_n(-1/2) = 0 (even n), +-2 (odd n)", centre, "n <= 40");
}

const LADDER: [usize; 4] = [25, 50, 100, 200];

fn c10_distribution(c: &mut Checks, s: &Shared) {
    let one = Complex64::new(1.0, 0.0);
    let d: Vec<f64> = LADDER.iter().map(|&n| kolmogorov_distance(s.tower.zeros(n))).collect();
    let lp: Vec<f64> = LADDER
        .iter()
        .map(|&n| log_potential(s.tower.zeros(n), one).unwrap().error())
        .collect();
    c.add("D_n decreasing", strictly_decreasing(&d), sci(&d));
    c.add("log-potential error decreasing", strictly_decreasing(&lp), sci(&lp));
    let frozen_d = [5.709017331198474e-2, 2.8943440322379627e-2, 1.4625272276285479e-2, 7.370342092299156e-3];
    let frozen_lp = [1.3065370399131193e-2, 6.532685199565569e-3, 3.266342599782812e-3, 1.6331712998914893e-3];
    let ok = d.iter().zip(frozen_d).all(|(&a, b)| close(a, b, 1e-9))
        && lp.iter().zip(frozen_lp).all(|(&a, b)| close(a, b, 1e-9));
    c.add("regression baselines", ok, "");
}

fn c11_weights(c: &mut Checks, s: &Shared) {
    let hp = Hp::new(256).unwrap();
    let t = &s.tower;
    let weights = |n: usize| compute_weights(t.zeros(n), t.poly(n - 1), t.poly(n), &hp).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut positive, mut summed, mut pf) = (true, true, true);
    let mut worst_sum = 0.0f64;
    let mut worst_pf = 0.0f64;
    for n in 2..=100 {
        let ws = weights(n);
        positive &= ws.min_lambda() > 0.0;
        let dev = ws.sum_deviation(&hp).abs();
        worst_sum = worst_sum.max(dev);
        summed &= dev <= 1e-15;
        if n <= 50 {
            let mut done = 0;
            while done < 5 {
                let z = Complex64::new(rng.gen_range(-3.0..2.0), rng.gen_range(-2.0..2.0));
                if distance_to_segment(z) < 0.05 {
                    continue;
                }
                let r = partial_fraction_check(&ws, t.poly(n - 1), t.poly(n), z, &hp).unwrap();
                worst_pf = worst_pf.max(r.err);
                pf &= r.err <= r.bound && r.err < 1e-12;
                done += 1;
            }
        }
    }
    c.add("lambda > 0", positive, "n <= 100");
    c.add("|sum lambda - 1| <= 1e-15", summed, format!("max {worst_sum:.1e}"));
    c.add("partial fractions at 5 random z", pf, format!("n <= 50, max err {worst_pf:.1e}"));
    let mut devs = Vec::new();
    let mut envelope = true;
    for n in LADDER {
        let ws = weights(n);
        let mass = weight_interval_sum(&ws, -0.75, -0.25, &hp).unwrap().sum;
        let max_lambda = ws.weights.iter().map(|w| to_f64(&w.lambda)).fold(0.0, f64::max);
        envelope &= (mass - 0.5).abs() <= 2.0 * max_lambda;
        devs.push(mass - 0.5);
    }
    c.add("|mass - 1/2| <= 2 max lambda", envelope, "");
    let abs: Vec<f64> = devs.iter().map(|d| d.abs()).collect();
    c.add_known_gap(
        "mass on (-3/4, -1/4) -> 1/2 monotonically",
        strictly_decreasing(&abs),
        format!("mass - 1/2 = {}", sci(&devs)),
    );
}

fn series_oracle(n: usize) -> BigRational {
    // sum_{k >= 0} k^n / 2^(k+1), cut where the tail is far below 1
    (0..400usize)
        .map(|k| BigRational::new(num_traits::pow(BigInt::from(k), n), BigInt::one() << (k + 1)))
        .sum()
}

fn c12_fubini(c: &mut Checks, s: &Shared) {
    let mut hp = Hp::new(256).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let (mut agree, mut gaps) = (true, true);
    let mut worst = 0.0f64;
    for n in 1..=40 {
        let f = fubini_limit(n, 1e-10, &mut hp).unwrap();
        let e = exterior_ratio(&s.polys[n], one, &mut hp).unwrap();
        let twice = e.computed.scale(&hp, &hp.from_u64(2));
        let diff = to_f64(&f.sample.computed.sub(&hp, &twice).abs(&hp));
        worst = worst.max(diff);
        agree &= diff <= 1e-10;
        gaps &= f.fubini_gap_ok;
    }
    c.add("fubini_limit = 2 exterior_ratio(1)", agree, format!("n <= 40, max {worst:.1e}"));
    c.add("partial sums within tail bound", gaps, "");
    let eps = rat(1, 1_000_000_000_000);
    let oracle = (0..=20).all(|n| {
        let a = BigRational::from_integer(fubini_number(n));
        (series_oracle(n) - a).abs() < eps
    });
    c.add("fubini_number = series oracle", oracle, "n <= 20");
}

struct Shared {
    polys: Vec<GeometricPolynomial>,
    tower: ZeroTower,
}

type Criterion = (usize, &'static str, Option<u64>, fn(&mut Checks, &Shared));

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "coefficient ground truth", Some(1), c1_ground_truth),
        (2, "generator equivalence", Some(10), c2_generators),
        (3, "structural invariants", Some(60), c3_invariants),
        (4, "zero structure", Some(600), c4_zeros),
        (5, "exact orthogonality", Some(120), c5_orthogonality),
        (6, "stieltjes identity", Some(30), c6_stieltjes),
        (7, "density and cdf", None, c7_density),
        (8, "exterior asymptotic", None, c8_exterior),
        (9, "interior asymptotic", None, c9_interior),
        (10, "zero distribution", None, c10_distribution),
        (11, "weights", None, c11_weights),
        (12, "fubini limit", None, c12_fubini),
    ];
    let start = Instant::now();
    let polys = gen_recurrence(100);
    let tower = ZeroTower::build(200, &width()).expect("tower");
    let tower_time = start.elapsed();
    let shared = Shared { polys, tower };
    let mut fatal = false;
    for (id, name, limit, run) in criteria {
        let mut checks = Checks::default();
        let t0 = Instant::now();
        run(&mut checks, &shared);
        let mut elapsed = t0.elapsed();
        if id == 4 {
            // the shared tower is this criterion's work
            elapsed += tower_time;
        }
        if let Some(secs) = limit {
            checks.add("runtime", elapsed <= Duration::from_secs(secs), format!("limit {secs} s"));
        }
        let failed: Vec<&Check> = checks.0.iter().filter(|c| !c.ok).collect();
        fatal |= failed.iter().any(|c| !c.known_gap);
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {id:>2} {verdict} {name} ({:.2} s)", elapsed.as_secs_f64());
        for f in &failed {
            let tag = if f.known_gap { " [known gap]" } else { "" };
            line.push_str(&format!("; failed: {}{tag} {}", f.label, f.detail));
        }
        let passed: Vec<String> = checks
            .0
            .iter()
            .filter(|c| c.ok)
            .map(|c| if c.detail.is_empty() { c.label.to_string() } else { format!("{} ({})", c.label, c.detail) })
            .collect();
        line.push_str(&format!("; ok: {}", passed.join(", ")));
        println!("{line}");
    }
    if fatal {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
