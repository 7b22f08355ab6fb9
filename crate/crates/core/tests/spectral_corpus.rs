//! Spectral invariants on the builtin domain corpus.

use lipbound::domains::{Domain, BUILTIN_MASKS};
use lipbound::spectral::{discretize, eigenvalues, weyl_ratio, Boundary, Spectrum};
use lipbound::NormSpec;

fn mean(v: &[(usize, f64)]) -> f64 {
    v.iter().map(|p| p.1).sum::<f64>() / v.len() as f64
}

#[test]
fn weyl_ratio_drifts_toward_one_on_every_corpus_domain() {
    let mut corpus: Vec<(String, Domain)> = BUILTIN_MASKS
        .iter()
        .filter(|m| **m != "slit_square")
        .map(|m| (m.to_string(), Domain::builtin_mask(m, None).unwrap()))
        .collect();
    corpus.push(("square".into(), Domain::unit_cube(2)));
    for (name, dom) in corpus {
        let side = dom.bounding_box().1[0] - dom.bounding_box().0[0];
        let g = discretize(&dom, side / 70.0).unwrap();
        for bc in [Boundary::Dirichlet, Boundary::Neumann] {
            let s = eigenvalues(&g, bc, 150).unwrap();
            let r = weyl_ratio(&s, s.volume, 2).unwrap();
            let (head, tail) = (mean(&r[..50]), mean(&r[r.len() - 50..]));
            assert!((tail - 1.0).abs() < (head - 1.0).abs(), "{name} {bc}: head {head:.4}, tail {tail:.4}");
        }
    }
}

#[test]
fn nested_domains_order_dirichlet_eigenvalues() {
    let frame = (vec![-1.0, -1.0], vec![1.0, 1.0]);
    let h = 1.0 / 25.0;
    let chain = [
        Domain::new_box(frame.0.clone(), frame.1.clone()).unwrap(),
        Domain::builtin_mask("disk", None).unwrap(),
        Domain::builtin_mask("annulus", None).unwrap(),
        Domain::ball(vec![0.6, 0.0], 0.35, NormSpec::l2()).unwrap(),
    ];
    let spectra: Vec<Spectrum> = chain
        .iter()
        .map(|d| eigenvalues(&lipbound::spectral::discretize_in_frame(d, h, &frame.0, &frame.1).unwrap(), Boundary::Dirichlet, 15).unwrap())
        .collect();
    for w in spectra.windows(2) {
        assert!(w[1].cells < w[0].cells);
        for (small, big) in w[1].eigenvalues.iter().zip(&w[0].eigenvalues) {
            assert!(*small >= big - 1e-9);
        }
    }
}

#[test]
fn refinement_on_the_square_is_second_order() {
    let ev = |n: usize| eigenvalues(&discretize(&Domain::unit_cube(2), 1.0 / n as f64).unwrap(), Boundary::Neumann, 10).unwrap().eigenvalues;
    let (a, b, c) = (ev(16), ev(32), ev(64));
    for k in 1..10 {
        let ratio = (a[k] - b[k]) / (b[k] - c[k]);
        assert!((ratio - 4.0).abs() < 0.4, "k={k}: ratio {ratio}");
    }
}

#[test]
fn spectrum_json_round_trip_and_heuristic_flag() {
    let g = discretize(&Domain::builtin_mask("slit_square", None).unwrap(), 0.1).unwrap();
    let s = eigenvalues(&g, Boundary::Neumann, 5).unwrap();
    assert!(s.heuristic);
    assert_eq!(Spectrum::from_json(&s.to_json().unwrap()).unwrap(), s);
    let d = eigenvalues(&g, Boundary::Dirichlet, 5).unwrap();
    assert!(!d.heuristic);
}
