use projip::engine::{solve_bounded, solve_nonneg, EngineOptions};
use projip::verify::{brute_force_solve, random_instance, BruteForceOptions, Family, Profile};

fn profile(seed: u64, nonneg: bool) -> Profile {
    let n = 2 + (seed % 5) as usize;
    let m = 1 + (seed / 5 % 2) as usize;
    let delta = 1 + (seed / 10 % 2) as i64;
    let family = Family::BUILT_IN[(seed / 20 % 4) as usize];
    let mut p = Profile::new(n, m, delta, family);
    if nonneg {
        p.box_lo = 0;
        p.lower_at_min = true;
    }
    p
}

#[test]
fn bounded_matches_brute_force() {
    for seed in 0..400 {
        let inst = random_instance(seed, &profile(seed, false));
        let got = solve_bounded(&inst, &EngineOptions::default()).unwrap().solution;
        let want = brute_force_solve(&inst, &BruteForceOptions::default()).unwrap();
        assert_eq!(got, want, "seed {seed}: {inst:?}");
    }
}

#[test]
fn nonneg_matches_brute_force() {
    for seed in 0..300 {
        let inst = random_instance(seed, &profile(seed, true));
        let report = solve_nonneg(&inst, &EngineOptions::default()).unwrap();
        let got = report.solution;
        let want = brute_force_solve(&inst, &BruteForceOptions::default()).unwrap();
        assert_eq!(got.value, want.value, "seed {seed}: {inst:?}");
        match (&got.x, report.stats.merged_n) {
            // Merging keeps the value; among tied points it picks the
            // smallest split per group, not the globally smallest point.
            (Some(x), Some(_)) => assert_eq!(inst.evaluate(x), got.value, "seed {seed}"),
            _ => assert_eq!(got.x, want.x, "seed {seed}"),
        }
    }
}

#[test]
fn unknown_w_matches_brute_force() {
    use projip::unknown_w::{solve_unknown_w, UnknownWOptions};
    use projip::verify::random_compressed_sensing;
    for seed in 0..300 {
        let n = 1 + (seed % 8) as usize;
        let m = 1 + (seed / 8 % 2) as usize;
        let (oracle, inst, z) = random_compressed_sensing(seed, n, m, 2);
        let r = solve_unknown_w(&oracle, &z, &UnknownWOptions { budget: n as u64, jobs: 1 }).unwrap();
        let want = brute_force_solve(&inst, &BruteForceOptions::default()).unwrap();
        assert_eq!(r.solution.value, want.value, "seed {seed}: {inst:?}");
        assert!(r.insertions <= m);
    }
}
