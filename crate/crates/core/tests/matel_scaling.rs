use blockade_core::fit::power_law_fit;
use blockade_core::matel::{
    interbranch_overlap, ladder_overlap_asymptotic, ladder_overlap_exact, s_b_asymptotic, s_b_exact,
};
use blockade_core::Branch;

const P: Branch = Branch::Plus;

#[test]
fn intrabranch_converges_to_bessel_form() {
    for delta in 1..=5 {
        let exact = ladder_overlap_exact(200, P, 200 + delta as u32, P).unwrap();
        let asym = 200f64.sqrt() * ladder_overlap_asymptotic(delta).unwrap();
        let ratio = exact / asym;
        assert!((ratio - 1.0).abs() < 0.05, "delta {delta}: {ratio}");
    }
    // the ratio approaches one as n grows
    let r = |n: u32| ladder_overlap_exact(n, P, n + 1, P).unwrap() / ((n as f64).sqrt() * ladder_overlap_asymptotic(1).unwrap());
    assert!((r(400) - 1.0).abs() < (r(40) - 1.0).abs());
}

#[test]
fn interbranch_is_suppressed() {
    for n in 10..=200 {
        let inter = interbranch_overlap(n, 0).unwrap();
        let intra = ladder_overlap_exact(n, P, n + 1, P).unwrap();
        assert!((inter / intra).powi(2) < 1e-2, "n = {n}");
    }
}

/// 20 log-spaced integers in [10, 100], duplicates removed.
fn fit_grid() -> Vec<u32> {
    let mut ns: Vec<u32> = (0..20).map(|k| (10f64 * 10f64.powf(k as f64 / 19.0)).round() as u32).collect();
    ns.dedup();
    ns
}

#[test]
fn interbranch_power_law() {
    let ns = fit_grid();
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = ns.iter().map(|&n| interbranch_overlap(n, 0).unwrap().abs()).collect();
    let fit = power_law_fit(&x, &y).unwrap();
    assert!((fit.slope + 0.83).abs() < 0.05, "exponent {}", fit.slope);
    assert!((fit.intercept.exp() - 0.07).abs() < 0.01, "prefactor {}", fit.intercept.exp());
    for n in 10..=100_u32 {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        assert_eq!(interbranch_overlap(n, 0).unwrap().signum(), sign);
    }
}

#[test]
fn symmetric_part_follows_power_law_shape() {
    // S(n, m) / (sqrt(n+m) |n-m|^{-5/3}) on the slice n + m = 80 varies slowly
    let total = 80;
    let ratios: Vec<f64> = (1..=20)
        .filter(|d| (total - d) % 2 == 0)
        .map(|d| {
            let n = (total - d) / 2;
            let m = n + d;
            s_b_exact(n, m).unwrap().0 / s_b_asymptotic(n, m).unwrap().0
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(lo > 0.0);
    assert!(hi / lo < 1.2, "S shape ratios spread {lo}..{hi}");
}

/// B(n, n+delta) for the slice n + m = total, delta of the same parity as total.
fn b_slice(total: u32) -> Vec<(u32, f64)> {
    (1..=total / 8)
        .filter(|d| (total - d) % 2 == 0)
        .map(|d| {
            let n = (total - d) / 2;
            (d, s_b_exact(n, n + d).unwrap().1)
        })
        .collect()
}

#[test]
fn b_slices_collapse_onto_each_other() {
    let reference = b_slice(120);
    for total in [40, 80] {
        for (d, b) in b_slice(total) {
            let (_, r) = reference.iter().find(|(dd, _)| *dd == d).copied().unwrap();
            assert!((b / r - 1.0).abs() < 0.15, "n+m {total}, delta {d}: {b} vs {r}");
        }
    }
}

#[test]
fn b_slices_collapse_onto_cube_root() {
    for total in [40, 80, 120] {
        for (d, b) in b_slice(total) {
            let target = s_b_asymptotic(0, d).unwrap().1;
            assert!((b / target - 1.0).abs() < 0.15, "n+m {total}, delta {d}: B = {b}, |delta|^(1/3) = {target}");
        }
    }
}
