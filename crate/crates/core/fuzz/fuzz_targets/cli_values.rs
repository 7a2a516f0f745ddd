#![no_main]
use compressive_sketch::datasets::{LabelColumn, SyntheticFamily};
use compressive_sketch::ImageShape;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(shape) = s.parse::<ImageShape>() {
        assert_eq!(shape.to_string().parse::<ImageShape>().unwrap(), shape);
    }
    let _ = s.parse::<LabelColumn>();
    let _ = s.parse::<SyntheticFamily>();
});
