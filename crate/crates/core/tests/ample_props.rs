use std::collections::BTreeSet;

use ftpg::ample::{
    chart_points, is_ample, is_ample_with_chart, pgl2, pgl2_apply, random_subset, AmpleFamily, AmpleSubset, Chart,
};
use ftpg::gf::Gf;
use ftpg::projgeom::ProjSpace;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const QS: [(u32, u32); 7] = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)];

#[test]
fn size_family_admissibility_matches_closed_form() {
    for (p, n) in QS {
        let f = Gf::new(p, n).unwrap();
        let q = f.q() as usize;
        for t in 0..=4 {
            let fam = AmpleFamily::size_at_most(&f, t);
            for m in 0..=4 {
                for k in 0..=4 {
                    let expected = q + 1 > m * t + k;
                    assert_eq!(fam.is_mn_admissible(m, k), expected, "q={q} t={t} m={m} n={k}");
                }
            }
        }
    }
}

#[test]
fn admissibility_is_monotone() {
    let f = Gf::new(5, 1).unwrap();
    let pairs = vec![vec![0, 1], vec![2, 3]];
    let fams = [
        AmpleFamily::empty_only(&f),
        AmpleFamily::size_at_most(&f, 1),
        AmpleFamily::size_at_most(&f, 2),
        AmpleFamily::explicit(&f, &pairs).unwrap(),
    ];
    for fam in &fams {
        for m1 in 0..=4 {
            for n1 in 0..=4 {
                if !fam.is_mn_admissible(m1, n1) {
                    continue;
                }
                for m2 in 0..=m1 {
                    for n2 in 0..=n1 {
                        assert!(fam.is_mn_admissible(m2, n2));
                    }
                }
            }
        }
    }
}

/// The closure of `seed` under PGL₂ together with all subsets, which is a
/// stable, downward-closed family.
fn stable_family(f: &Gf, seed: &[u32]) -> AmpleFamily {
    let line = ProjSpace::new(f, 2).unwrap();
    let mut sets = BTreeSet::new();
    for g in pgl2(f) {
        let mut img: Vec<u32> = seed.iter().map(|&x| pgl2_apply(&line, &g, x)).collect();
        img.sort_unstable();
        sets.insert(img);
    }
    let sets: Vec<Vec<u32>> = sets.into_iter().collect();
    let fam = AmpleFamily::explicit(f, &sets).unwrap();
    assert!(fam.is_pgl2_stable());
    fam
}

#[test]
fn charts_agree_for_stable_families() {
    let f = Gf::new(5, 1).unwrap();
    let s = ProjSpace::new(&f, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (seed_set, size) in [(&[0, 1][..], 25), (&[0, 1][..], 28), (&[0, 1, 2, 3][..], 20), (&[0, 1, 2, 3][..], 26)] {
        let fam = stable_family(&f, seed_set);
        for _ in 0..20 {
            let u = random_subset(&s, size, &mut rng);
            let base = is_ample_with_chart(&u, &fam, Chart::Reduced).unwrap().ample;
            for chart in [Chart::Swapped, Chart::Sheared] {
                assert_eq!(is_ample_with_chart(&u, &fam, chart).unwrap().ample, base);
            }
        }
    }
}

#[test]
fn charts_are_bijections_onto_lines() {
    let f = Gf::new(3, 2).unwrap();
    let s = ProjSpace::new(&f, 3).unwrap();
    for l in 0..s.line_count() as u32 {
        for chart in [Chart::Reduced, Chart::Swapped, Chart::Sheared] {
            let mut pts = chart_points(&s, l, chart);
            pts.sort_unstable();
            assert_eq!(pts, s.points_on(l));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// If U ⊆ U' then on every line meeting U the complement of U' is a
    /// subset of the complement of U, so a downward-closed family that
    /// contains the latter contains the former.
    #[test]
    fn ampleness_monotone_on_lines(seed in any::<u64>(), size in 15usize..31, extra in 0usize..10, t in 0usize..3) {
        let f = Gf::new(5, 1).unwrap();
        let s = ProjSpace::new(&f, 3).unwrap();
        let fam = AmpleFamily::size_at_most(&f, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_subset(&s, size, &mut rng);
        let more = random_subset(&s, extra, &mut rng);
        let mut pts: Vec<u32> = u.points().iter().chain(more.points()).copied().collect();
        pts.sort_unstable();
        pts.dedup();
        let bigger = AmpleSubset::new(&s, &pts).unwrap();
        if is_ample(&u, &fam).unwrap().ample {
            for l in u.lines_meeting() {
                let missing: Vec<u32> = s.points_on(l).iter().copied().filter(|&x| !bigger.contains(x)).collect();
                prop_assert!(missing.len() <= t);
            }
            if bigger.lines_meeting() == u.lines_meeting() {
                prop_assert!(is_ample(&bigger, &fam).unwrap().ample);
            }
        }
    }
}

#[test]
fn whole_space_is_ample_for_empty_only() {
    for (p, n) in QS {
        let f = Gf::new(p, n).unwrap();
        let s = ProjSpace::new(&f, 3).unwrap();
        let rep = is_ample(&AmpleSubset::whole(&s), &AmpleFamily::empty_only(&f)).unwrap();
        assert!(rep.ample);
        assert_eq!(rep.max_complement, 0);
    }
}
