//! Prints the marginal score of one GW of each technology in each year
//! under the zero-volatility price path. The score is linear in the plan,
//! so these coefficients fully describe the deterministic problem.

use netzero_core::env::{episode_score, EnvConfig, Plan, Tech};

fn main() {
    let path = std::env::args().nth(1);
    let cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).expect("read config");
            let v: serde_json::Value = serde_json::from_str(&text).expect("json");
            let env = v.get("env").cloned().unwrap_or(v);
            serde_json::from_value::<EnvConfig>(env).expect("config")
        }
        None => EnvConfig::placeholder(),
    }
    .deterministic();
    println!("year      wind        blue       green");
    for t in 0..cfg.horizon {
        let mut row = Vec::new();
        for k in Tech::ALL {
            let mut plan = Plan::zeros(cfg.horizon);
            plan.set(t, k, 1.0);
            row.push(episode_score(&cfg, 0, &plan).expect("episode"));
        }
        println!("{:>4} {:>11.2} {:>11.2} {:>11.2}", 2031 + t, row[0], row[1], row[2]);
    }
}
