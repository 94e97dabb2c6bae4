use netzero_core::pricing::*;
use proptest::prelude::*;

/// Closed-form log-space mean and variance `s` steps after a start at
/// step 0 with log price `x0`.
fn ar1_moments(p: &SeriesParams, x0: f64, s: usize) -> (f64, f64) {
    let phi = 1.0 - p.kappa;
    let mut mean = phi.powi(s as i32) * x0;
    for j in 1..=s {
        mean += p.kappa * phi.powi((s - j) as i32) * p.reference[j].ln();
    }
    let var = (0..s).map(|i| p.sigma * p.sigma * phi.powi(2 * i as i32)).sum();
    (mean, var)
}

#[test]
fn monte_carlo_log_mean_within_four_standard_errors() {
    let params = NoiseParams::placeholder();
    let n = 10_000;
    let mut sums = vec![[0.0f64; 4]; HORIZON];
    let mut sq = vec![[0.0f64; 4]; HORIZON];
    for seed in 0..n {
        let mut st = PriceState::reset(&params, seed).unwrap();
        for t in 0..HORIZON {
            if t > 0 {
                st.advance(&params).unwrap();
            }
            for (k, id) in PriceSeriesId::ALL.iter().enumerate() {
                let x = st.log_prices()[*id];
                sums[t][k] += x;
                sq[t][k] += x * x;
            }
        }
    }
    let nf = n as f64;
    for t in 1..HORIZON {
        for (k, id) in PriceSeriesId::ALL.iter().enumerate() {
            let p = &params[*id];
            let (mean, var) = ar1_moments(p, p.reference[0].ln(), t);
            let sample_mean = sums[t][k] / nf;
            let sample_var = (sq[t][k] - nf * sample_mean * sample_mean) / (nf - 1.0);
            let se = (sample_var / nf).sqrt();
            assert!((sample_mean - mean).abs() <= 4.0 * se, "{id:?} t={t}: {sample_mean} vs {mean} (se {se})");
            assert!((sample_var / var - 1.0).abs() < 0.1, "{id:?} t={t}: var {sample_var} vs {var}");
        }
    }
}

#[test]
fn forecast_is_exp_of_conditional_mean() {
    let params = NoiseParams::placeholder();
    let st = PriceState::reset(&params, 5).unwrap();
    let f = st.forecast(&params);
    for id in PriceSeriesId::ALL {
        let p = &params[id];
        for (i, v) in f[id].iter().enumerate() {
            let (mean, _) = ar1_moments(p, p.reference[0].ln(), i + 1);
            assert!((v / mean.exp() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn unit_kappa_forecast_is_reference() {
    let mut params = NoiseParams::placeholder();
    for id in PriceSeriesId::ALL {
        params[id].kappa = 1.0;
    }
    let mut st = PriceState::reset(&params, 77).unwrap();
    for _ in 0..6 {
        st.advance(&params).unwrap();
    }
    let f = st.forecast(&params);
    for id in PriceSeriesId::ALL {
        assert_eq!(f[id].len(), HORIZON - 1 - 6);
        for (i, v) in f[id].iter().enumerate() {
            let r = params[id].reference[7 + i];
            assert!((v - r).abs() <= 1e-12 * r);
        }
    }
}

proptest! {
    #[test]
    fn zero_volatility_forecast_matches_realised(seed in any::<u64>(), start in 0usize..HORIZON) {
        let noisy = NoiseParams::placeholder();
        let quiet = noisy.deterministic();
        let mut st = PriceState::reset(&noisy, seed).unwrap();
        for _ in 0..start {
            st.advance(&noisy).unwrap();
        }
        let f = st.forecast(&quiet);
        let mut path = st.clone();
        for s in 0..HORIZON - 1 - start {
            path.advance(&quiet).unwrap();
            let prices = path.prices();
            for id in PriceSeriesId::ALL {
                prop_assert!((f[id][s] - prices[id]).abs() <= 1e-12 * prices[id]);
            }
        }
        prop_assert!(path.advance(&quiet).is_err());
    }

    #[test]
    fn prices_stay_positive_and_reproducible(seed in any::<u64>()) {
        let params = NoiseParams::placeholder();
        let mut a = PriceState::reset(&params, seed).unwrap();
        let mut b = PriceState::reset(&params, seed).unwrap();
        for _ in 1..HORIZON {
            a.advance(&params).unwrap();
            b.advance(&params).unwrap();
            prop_assert_eq!(a.prices(), b.prices());
            prop_assert!(a.prices().iter().all(|(_, v)| *v > 0.0 && v.is_finite()));
        }
    }
}
