#![no_main]
use compressive_sketch::datasets::{parse_csv_dataset, read_csv, CsvOptions, LabelColumn};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&mode, body)) = data.split_first() else {
        return;
    };
    let label_column = match mode % 3 {
        0 => LabelColumn::None,
        1 => LabelColumn::Last,
        _ => LabelColumn::Index((mode / 3) as usize % 4),
    };
    let opts = CsvOptions {
        label_column,
        has_header: mode & 0x80 != 0,
    };
    if let Ok(table) = read_csv(body, opts) {
        assert_eq!(table.values.len(), table.rows() * table.n);
    }
    if let Ok(ds) = parse_csv_dataset(body, opts) {
        assert!(ds.labels().iter().all(|&y| y < ds.num_classes()));
    }
});
