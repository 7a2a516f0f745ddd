#![no_main]
use compressive_sketch::datasets::parse_cifar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ds) = parse_cifar(data) {
        assert_eq!(ds.len() * 3073, data.len());
    }
});
