use extremaldep::dependence::{coefficient_report, DEFAULT_TOL};
use extremaldep::{ModelSpec, PartitionSpec, TauVector};

fn main() -> extremaldep::Result<()> {
    let model = ModelSpec::ThreeDependent.build()?;
    let split: PartitionSpec = "1,2|3".parse()?;
    let report = coefficient_report(&model, &split, &TauVector::ones(3), DEFAULT_TOL)?;
    assert_eq!(report.pair_epsilon, Some(0.5));
    Ok(())
}
