mod common;

use compressive_sketch::{ConvStage, FeatureMapSpec, ImageShape, RcnnArchitecture, RcnnMap};

use common::{max_rel_diff, naive_rcnn, uniform_points};

fn tiny() -> RcnnMap {
    let arch = RcnnArchitecture {
        input: ImageShape::new(8, 8, 1),
        stages: vec![ConvStage { kernel: 3, out_channels: 2, pool: 2 }],
    };
    RcnnMap::build(&FeatureMapSpec::rcnn(arch, 4, 77)).unwrap()
}

#[test]
fn tiny_architecture_matches_loops() {
    let map = tiny();
    for x in uniform_points(5, "tiny-inputs", 5, 64) {
        let fast = map.eval(&x).unwrap();
        let slow = naive_rcnn(&map, &x);
        assert!(max_rel_diff(&fast, &slow) <= 1e-6, "{fast:?} vs {slow:?}");
    }
}

#[test]
fn two_stage_multichannel_matches_loops() {
    // Odd sizes exercise the pooling floor and multi-channel patches.
    let arch = RcnnArchitecture {
        input: ImageShape::new(15, 13, 3),
        stages: vec![
            ConvStage { kernel: 3, out_channels: 4, pool: 2 },
            ConvStage { kernel: 2, out_channels: 5, pool: 2 },
        ],
    };
    let map = RcnnMap::build(&FeatureMapSpec::rcnn(arch, 7, 3)).unwrap();
    for x in uniform_points(6, "multi-inputs", 3, 15 * 13 * 3) {
        assert!(max_rel_diff(&map.eval(&x).unwrap(), &naive_rcnn(&map, &x)) <= 1e-9);
    }
}

#[test]
fn lenet_mnist_matches_loops() {
    let arch = RcnnArchitecture::lenet(ImageShape::new(28, 28, 1));
    let map = RcnnMap::build(&FeatureMapSpec::rcnn(arch, 25, 9)).unwrap();
    for x in uniform_points(7, "mnist-inputs", 2, 784) {
        let x: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        assert!(max_rel_diff(&map.eval(&x).unwrap(), &naive_rcnn(&map, &x)) <= 1e-9);
    }
}

#[test]
fn same_features_on_any_thread_count() {
    let arch = RcnnArchitecture::lenet(ImageShape::new(28, 28, 1));
    let map = RcnnMap::build(&FeatureMapSpec::rcnn(arch, 16, 1)).unwrap();
    let x: Vec<f64> = uniform_points(8, "threads", 1, 784).remove(0);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| map.eval(&x).unwrap())
    };
    assert_eq!(run(1), run(3));
}
