use fastrate_bench::{linear_dataset, linear_instances};

#[test]
fn linear_inputs_are_bounded_and_seeded() {
    let a = linear_instances(50, 6, 0.1, 9);
    assert_eq!(a, linear_instances(50, 6, 0.1, 9));
    assert!(a.iter().all(|z| z.y.abs() <= 1.1 && z.x.len() == 6));
    assert_eq!(linear_dataset(50, 6, 0.1, 9).len(), 50);
}
