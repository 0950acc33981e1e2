use elfscan::field::{feature_vector, rms, Condition, PowerSource, Side};
use elfscan::io::{format_models, parse_models, read_survey, write_survey, ModelSet};
use elfscan::sim::{fixtures, model_field, synthesize_survey, GridSpec};

fn cell(side: Side, power: PowerSource, noise: f64) -> elfscan::field::SurveyDataset {
    synthesize_survey(&fixtures::fixture_laptops(power), &GridSpec::default_for(side), power, noise, 42).unwrap()
}

#[test]
fn generated_survey_round_trips_through_csv() {
    let datasets: Vec<_> = Condition::ALL
        .iter()
        .map(|c| cell(c.side, c.power_source, 0.01))
        .collect();
    let mut buf = Vec::new();
    write_survey(&mut buf, &datasets).unwrap();
    let cells = read_survey(buf.as_slice()).unwrap();
    assert_eq!(cells.len(), 4);
    for (orig, back) in datasets.iter().zip(&cells) {
        assert_eq!(orig.condition, back.dataset.condition);
        assert!(back.validation.is_valid() && back.validation.warnings.is_empty());
        let a = feature_vector(orig).unwrap();
        let b = feature_vector(&back.dataset).unwrap();
        assert_eq!(a.len(), 117);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((&x.laptop_id, x.point), (&y.laptop_id, y.point));
            assert!((x.value - y.value).abs() <= 1e-9);
        }
    }
}

#[test]
fn ingested_features_match_the_simulator() {
    let power = PowerSource::Battery;
    let laptops = fixtures::fixture_laptops(power);
    let grid = GridSpec::default_for(Side::BottomBody);
    let ds = synthesize_survey(&laptops, &grid, power, 0.0, 0).unwrap();
    let mut buf = Vec::new();
    write_survey(&mut buf, &[ds]).unwrap();
    let back = read_survey(buf.as_slice()).unwrap().remove(0).dataset;
    for f in feature_vector(&back).unwrap() {
        let direct = rms(&model_field(&laptops[&f.laptop_id].wires, grid.position(f.point).unwrap()).unwrap()).unwrap();
        assert!((f.value - direct).abs() <= 1e-9, "{} {}", f.laptop_id, f.point);
    }
}

#[test]
fn partial_file_yields_only_present_cells() {
    let mut buf = Vec::new();
    write_survey(&mut buf, &[cell(Side::TopBody, PowerSource::Ac, 0.0)]).unwrap();
    let cells = read_survey(buf.as_slice()).unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0].dataset.condition, Condition::new(Side::TopBody, PowerSource::Ac));
    assert_eq!(cells[0].dataset.len(), 117);
}

#[test]
fn model_file_round_trips_the_fixture() {
    let set: ModelSet = PowerSource::ALL.iter().map(|&p| (p, fixtures::fixture_laptops(p))).collect();
    let text = format_models(&set);
    assert_eq!(parse_models(&text).unwrap(), set);
    assert_eq!(format_models(&parse_models(&text).unwrap()), text);
}
