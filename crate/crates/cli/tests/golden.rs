mod common;

#[test]
fn golden_outputs_are_byte_identical() {
    for (name, args) in common::GOLDEN {
        common::check_golden(name, args).unwrap();
    }
}
