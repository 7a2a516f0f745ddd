#![no_main]
use compressive_sketch::ModelFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Anything that decodes must re-encode to the same bytes.
    if let Ok(model) = ModelFile::from_bytes(data) {
        assert_eq!(model.to_bytes(), data);
    }
});
