//! Runs the full analysis on every bundled system and re-checks each certificate from its JSON form.

use std::time::Duration;

use rtc::certificate::{check_certificate_detailed, Certificate};
use rtc::corpus;
use rtc::pipeline::{analyze, AnalysisConfig};

fn main() {
    let config = AnalysisConfig {
        timeout: Duration::from_secs(30),
        ..AnalysisConfig::default()
    };
    for (name, _) in corpus::ALL {
        let trs = corpus::load(name).unwrap();
        let analysis = analyze(&trs, &config);
        print!("{name:8} {:16}", analysis.verdict());
        match &analysis.certificate {
            Some(c) => {
                let back = Certificate::from_json(&c.to_json()).unwrap();
                let status = match check_certificate_detailed(&trs, &back) {
                    Ok(()) => "accepted".to_string(),
                    Err(e) => format!("rejected: {e}"),
                };
                println!(" {:14} {status}", c.method);
            }
            None => println!(),
        }
    }
}
