use rand::seq::SliceRandom;

use super::{DependenceMode, EnsembleForecast};
use crate::rng;

// Label separating permutation streams from simulation streams.
const PERMUTATION_LABEL: u64 = 0x5045_524d;

/// Re-joins the per-hour values of `ens` into paths with the dependence
/// structure of `mode`. Per-hour multisets are unchanged; `Standard`
/// returns a copy.
pub fn rearrange(ens: &EnsembleForecast, mode: DependenceMode) -> EnsembleForecast {
    let m = ens.n_paths();
    let horizon = ens.horizon();
    let mut paths = vec![vec![0.0; horizon]; m];
    for h in 0..horizon {
        let mut column = ens.hour(h);
        match mode {
            DependenceMode::Standard => {}
            DependenceMode::Comonotone => column.sort_by(f64::total_cmp),
            DependenceMode::Countermonotone => {
                column.sort_by(f64::total_cmp);
                if h % 2 == 1 {
                    column.reverse();
                }
            }
            DependenceMode::Independent => {
                let seed = rng::derive_seed(ens.seed, &[PERMUTATION_LABEL, ens.origin as u64]);
                column.shuffle(&mut rng::substream(seed, h as u64));
            }
        }
        for (p, v) in paths.iter_mut().zip(column) {
            p[h] = v;
        }
    }
    EnsembleForecast {
        paths,
        origin: ens.origin,
        seed: ens.seed,
        mode,
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// `H × H` Spearman rank correlations between the hours of an ensemble.
/// Hours with constant values get correlation 0 with every other hour.
pub fn rank_correlation(ens: &EnsembleForecast) -> Vec<Vec<f64>> {
    let horizon = ens.horizon();
    let centred: Vec<Vec<f64>> = (0..horizon)
        .map(|h| {
            let r = ranks(&ens.hour(h));
            let mean = r.iter().sum::<f64>() / r.len() as f64;
            r.iter().map(|x| x - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centred.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut out = vec![vec![0.0; horizon]; horizon];
    for a in 0..horizon {
        for b in 0..horizon {
            out[a][b] = if a == b {
                1.0
            } else if norms[a] == 0.0 || norms[b] == 0.0 {
                0.0
            } else {
                let num: f64 = centred[a].iter().zip(&centred[b]).map(|(x, y)| x * y).sum();
                num / (norms[a] * norms[b])
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ens(paths: Vec<Vec<f64>>) -> EnsembleForecast {
        EnsembleForecast::new(paths, 3, 11, DependenceMode::Standard).unwrap()
    }

    fn sorted_marginals(e: &EnsembleForecast) -> Vec<Vec<f64>> {
        (0..e.horizon())
            .map(|h| {
                let mut v = e.hour(h);
                v.sort_by(f64::total_cmp);
                v
            })
            .collect()
    }

    #[test]
    fn two_path_examples() {
        let co = rearrange(&ens(vec![vec![1.0, 4.0], vec![3.0, 2.0]]), DependenceMode::Comonotone);
        assert_eq!(co.paths(), &[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let counter = rearrange(&ens(vec![vec![1.0, 2.0], vec![3.0, 4.0]]), DependenceMode::Countermonotone);
        assert_eq!(counter.paths(), &[vec![1.0, 4.0], vec![3.0, 2.0]]);
    }

    #[test]
    fn marginals_preserved_and_independent_is_seeded() {
        let paths: Vec<Vec<f64>> = (0..50)
            .map(|i| (0..6).map(|h| ((i * 37 + h * 11) % 23) as f64 + h as f64 * 0.5).collect())
            .collect();
        let e = ens(paths);
        let base = sorted_marginals(&e);
        for mode in DependenceMode::ALL {
            let r = rearrange(&e, mode);
            assert_eq!(sorted_marginals(&r), base);
            assert_eq!(r.mode, mode);
        }
        assert_eq!(
            rearrange(&e, DependenceMode::Independent),
            rearrange(&e, DependenceMode::Independent)
        );
    }

    #[test]
    fn comonotone_paths_do_not_cross() {
        let paths: Vec<Vec<f64>> = (0..30)
            .map(|i| (0..5).map(|h| ((i * 7919 + h * 104_729) % 97) as f64).collect())
            .collect();
        let co = rearrange(&ens(paths), DependenceMode::Comonotone);
        for p in co.paths() {
            for q in co.paths() {
                let signs: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).filter(|d| *d != 0.0).map(f64::signum).collect();
                assert!(signs.windows(2).all(|w| w[0] == w[1]));
            }
        }
        let rc = rank_correlation(&co);
        assert!(rc.iter().flatten().all(|&c| (c - 1.0).abs() < 1e-12));
    }

    #[test]
    fn countermonotone_rank_correlation_alternates() {
        let paths: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * 3 % 20) as f64, (i * 7 % 20) as f64]).collect();
        let rc = rank_correlation(&rearrange(&ens(paths), DependenceMode::Countermonotone));
        assert!((rc[0][1] + 1.0).abs() < 1e-12);
        assert!((rc[0][2] - 1.0).abs() < 1e-12);
    }
}
