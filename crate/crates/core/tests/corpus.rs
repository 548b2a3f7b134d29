use pantagruel_core::syntax::format_program;
use pantagruel_core::{
    compile, parse_program, run_trace, DiagnosticCode, ExternalChange, StepConfig, TriggerMode, Value,
};

const BUILDING: &str = include_str!("../corpus/building.ptg");
const SPEC: &str = include_str!("../corpus/building_spec.ptg");
const AGGREGATE: &str = include_str!("../corpus/building_aggregate.ptg");

#[test]
fn corpus_programs_check_as_expected() {
    let program = compile(BUILDING).unwrap();
    assert_eq!(program.rules.len(), 3);
    assert_eq!(program.initial.len(), 8);
    assert!(program.warnings.is_empty());

    let spec = compile(SPEC).unwrap();
    assert!(spec.rules.is_empty());
    assert_eq!(spec.initial, program.initial);

    let errors = compile(AGGREGATE).unwrap_err();
    assert_eq!(errors.iter().map(|d| d.code).collect::<Vec<_>>(), vec![DiagnosticCode::UnsupportedConstruct]);
}

#[test]
fn formatting_round_trips_the_corpus() {
    for text in [BUILDING, SPEC, AGGREGATE] {
        let ast = parse_program(text).unwrap();
        let printed = format_program(&ast);
        assert_eq!(parse_program(&printed).unwrap(), ast);
        // printing is a fixpoint after one pass
        assert_eq!(format_program(&parse_program(&printed).unwrap()), printed);
    }
}

#[test]
fn runs_are_deterministic() {
    let program = compile(BUILDING).unwrap();
    let script: Vec<Vec<ExternalChange>> = (0..20)
        .map(|i| {
            vec![
                ExternalChange::event("m10", "detected", Value::Tr(i % 3 == 0)),
                ExternalChange::event("m20", "detected", Value::Tr(i % 2 == 0)),
                ExternalChange::event("thermo", "temperature", Value::Nat(28 + i % 4)),
            ]
        })
        .collect();
    for mode in [TriggerMode::Edge, TriggerMode::Level] {
        let config = StepConfig { mode, ..StepConfig::default() };
        let first = run_trace(&program, &script, None, config).unwrap();
        let second = run_trace(&program, &script, None, config).unwrap();
        assert_eq!(first, second);
        assert!(first.iter().any(|r| !r.fired.is_empty()));
    }
}
