use pwls::boussinesq::{run_simulation, water_volume, AquiferConfig, AquiferState, WarmStart};
use pwls::{Method, SolveOptions};

fn main() -> pwls::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_half = args.next().map_or(25, |s| s.parse().expect("N"));
    let method: Method = args.next().map_or(Ok(Method::Newton), |s| s.parse())?;
    let cfg = AquiferConfig::default().with_grid(n_half);
    let opts = SolveOptions {
        max_iterations: 100_000,
        ..SolveOptions::default()
    };
    println!("day 0: volume {:.1}", water_volume(&cfg, &AquiferState::initial(&cfg)));
    for d in run_simulation(&cfg, method, &WarmStart::PreviousDay, &opts)? {
        println!(
            "day {}: volume {:.1}, {} iterations, {:?}, {:.2}s",
            d.state.day, d.volume, d.report.iterations, d.report.status, d.report.wall_time_s
        );
    }
    Ok(())
}
