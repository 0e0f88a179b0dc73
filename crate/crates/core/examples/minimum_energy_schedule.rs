//! Minimum-energy speed schedule for a small instance, checked against the
//! discretized convex solver.

use speedgame::oracle::oracle_energy;
use speedgame::yds::yds_run;
use speedgame::{validate_schedule, Job, StrategyProfile};

fn main() -> speedgame::Result<()> {
    let alpha = 2.0;
    // (workload, release, priority)
    let jobs = vec![
        Job::new(0, 2.0, 0.0, 1.0),
        Job::new(1, 1.0, 0.0, 2.0),
        Job::new(2, 1.5, 1.5, 1.0),
        Job::new(3, 0.5, 3.0, 0.5),
    ];
    let profile = StrategyProfile::new(vec![1.0, 2.0, 3.5, 5.0]);

    let run = yds_run(&jobs, &profile)?;
    println!("critical intervals, densest first:");
    for iv in &run.intervals {
        println!(
            "  [{:.3}, {:.3})  jobs {:?}  density {:.4}",
            iv.start, iv.end, iv.included_jobs, iv.density
        );
    }
    println!("\n start     end       speed     job");
    for s in &run.schedule.segments {
        let job = s.job.map_or("idle".to_string(), |j| j.to_string());
        println!(
            "{:>6.3}  {:>6.3}  {:>8.4}     {job}",
            s.start, s.end, s.speed
        );
    }
    let violations = validate_schedule(&run.schedule, &jobs, &profile);
    assert!(violations.is_empty(), "{violations:?}");

    let energy = run.schedule.energy(alpha);
    let oracle = oracle_energy(&jobs, &profile, alpha, 400)?;
    println!("\nenergy {energy:.6}  (discretized solver {oracle:.6})");
    for j in &jobs {
        println!(
            "  job {} pays {:.6}",
            j.id,
            run.schedule.job_energy(j.id, alpha)
        );
    }
    Ok(())
}
