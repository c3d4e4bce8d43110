use spotter_core::detector::{detect, PyramidConfig};
use spotter_core::evalkit::{operating_point, roc_curve, score_dataset};
use spotter_core::netzoo::{build_net, NetKind, NetworkParams};
use spotter_core::synthgen::{generate_dataset, synth_scene, DataKind, GenConfig, Sample};
use spotter_core::trainer::{evaluate, load_model, save_model, train, TrainConfig};

fn samples(kind: DataKind, count: usize, seed: u64) -> Vec<Sample> {
    generate_dataset(&GenConfig::new(kind, count, seed))
        .unwrap()
        .into_iter()
        .map(|g| g.sample)
        .collect()
}

fn quick_train(kind: NetKind, data: &[Sample]) -> NetworkParams {
    let cfg = TrainConfig {
        epochs: 1,
        batch_size: 20,
        seed: 9,
        ..TrainConfig::default()
    };
    train(&build_net(kind), data, &[], &cfg).unwrap().0
}

#[test]
fn zero_weights_score_one_half() {
    let spec = build_net(NetKind::Unigram);
    let data = samples(DataKind::Unigram, 20, 1);
    let set = score_dataset(&spec, &NetworkParams::zeros(&spec), &data).unwrap();
    assert!(set.scores.iter().all(|&s| s == 0.5));
}

#[test]
fn scores_are_probabilities_in_data_order() {
    let data = samples(DataKind::Bigram, 120, 2);
    let spec = build_net(NetKind::BigramShared);
    let params = quick_train(NetKind::BigramShared, &data);
    let set = score_dataset(&spec, &params, &data).unwrap();
    assert!(set.scores.iter().all(|&s| s > 0.0 && s < 1.0));

    let mut reversed = data.clone();
    reversed.reverse();
    let back = score_dataset(&spec, &params, &reversed).unwrap();
    let mut again = back.scores.clone();
    again.reverse();
    assert_eq!(again, set.scores);
    assert_eq!(roc_curve(&back).unwrap(), roc_curve(&set).unwrap());
}

#[test]
fn reloaded_model_gives_identical_validation_loss() {
    let data = samples(DataKind::Unigram, 100, 3);
    let val = samples(DataKind::Unigram, 40, 4);
    let spec = build_net(NetKind::Unigram);
    let params = quick_train(NetKind::Unigram, &data);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bgnm");
    save_model(&spec, &params, &path).unwrap();
    let (spec2, params2) = load_model(&path).unwrap();
    assert_eq!(spec2, spec);
    assert_eq!(evaluate(&spec, &params, &val).unwrap(), evaluate(&spec2, &params2, &val).unwrap());
}

#[test]
fn parallel_and_sequential_detection_agree() {
    let spec = build_net(NetKind::BigramShared);
    let params = NetworkParams::he_init(&spec, 5);
    let scene = synth_scene(&GenConfig::new(DataKind::Bigram, 1, 0), 200, 150, 3, 6).unwrap();
    let run = |parallel| {
        let cfg = PyramidConfig {
            parallel,
            ..PyramidConfig::default()
        };
        detect(&spec, &params, &scene.image, 0.5, &cfg).unwrap()
    };
    assert_eq!(run(true), run(false));
}

#[test]
fn short_training_beats_chance_on_held_out_bigrams() {
    let data = samples(DataKind::Bigram, 600, 7);
    let test = samples(DataKind::Bigram, 200, 8);
    let spec = build_net(NetKind::BigramShared);
    let cfg = TrainConfig {
        epochs: 2,
        batch_size: 50,
        seed: 1,
        ..TrainConfig::default()
    };
    let (params, _) = train(&spec, &data, &[], &cfg).unwrap();
    let (_, acc) = evaluate(&spec, &params, &test).unwrap();
    assert!(acc > 0.6, "accuracy {acc}");
    let curve = roc_curve(&score_dataset(&spec, &params, &test).unwrap()).unwrap();
    // Balanced set: the everything-positive point already has precision 0.5.
    assert_eq!(operating_point(&curve, 0.5).unwrap().recall, 1.0);
}
