use mediasent_wasm::{demo_series, hp_trend, simulate_index, ToyClassifier};

#[test]
fn hp_trend_follows_a_line() {
    let line: Vec<f64> = (0..50).map(|t| 2.0 * t as f64 - 3.0).collect();
    let trend = hp_trend(line.clone(), 1600.0).unwrap();
    for (a, b) in trend.iter().zip(&line) {
        assert!((a - b).abs() < 1e-8);
    }
    assert_eq!(demo_series(120, 3), demo_series(120, 3));
}

#[test]
fn index_simulation_is_bounded_and_smoothed() {
    let demo = simulate_index(48, 20, 0.6, 0.3, 12, 7).unwrap();
    let (emsi, ma) = (demo.emsi(), demo.smoothed());
    assert_eq!((emsi.len(), ma.len()), (48, 48));
    assert!(emsi.iter().all(|v| v.abs() <= 1.0));
    assert!(ma[..6].iter().all(|v| v.is_nan()) && ma[42..].iter().all(|v| v.is_nan()));
    let by_hand: f64 = (0..=12)
        .map(|j| emsi[j] * if j == 0 || j == 12 { 0.5 } else { 1.0 })
        .sum::<f64>()
        / 12.0;
    assert!((ma[6] - by_hand).abs() < 1e-12);

    let flat = simulate_index(3, 10, 0.0, 1.0, 0, 1).unwrap();
    assert_eq!(flat.emsi(), vec![0.0; 3]);
}

#[test]
fn toy_classifier_reproduces_the_hand_example() {
    let c = ToyClassifier::new(
        "positive: good growth\npositive: strong growth\n\nnegative: weak recession\n",
    )
    .unwrap();
    assert_eq!(c.classify("good growth"), "positive");
    assert_eq!(c.vocabulary_size(), 5);
    let post = c.posteriors("good growth");
    let pos = c.classes().iter().position(|k| k == "positive").unwrap();
    let (p, n) = (4.0 / 81.0, 1.0 / 147.0);
    assert!((post[pos] - p / (p + n)).abs() < 1e-12);
    assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}
