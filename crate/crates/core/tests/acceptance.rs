use beamspec::acceptance::run_all;

fn main() {
    println!(
        "running {} acceptance criteria",
        beamspec::acceptance::CRITERIA.len()
    );
    let reports = run_all(|r| println!("{r}"));
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        reports.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
