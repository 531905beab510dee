use oppk::verify::{run, Suite};

fn main() -> oppk::Result<()> {
    let limit = std::env::args().nth(1).map(|s| s.parse().expect("limit")).unwrap_or(20_000);
    for (suite, l) in [(Suite::Examples, None), (Suite::Theorems, Some(limit))] {
        let report = run(suite, l)?;
        for c in &report.checks {
            println!("{c}");
        }
    }
    Ok(())
}
