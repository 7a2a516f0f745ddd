//! Sketching must use O(K·m) memory whatever the stream length.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};

use compressive_sketch::{sketch_stream, FeatureMapSpec, PriorMode, RffMap};

struct Counting;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let live = LIVE.fetch_add(layout.size(), Ordering::SeqCst) + layout.size();
        PEAK.fetch_max(live, Ordering::SeqCst);
        System.alloc(layout)
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        LIVE.fetch_sub(layout.size(), Ordering::SeqCst);
        System.dealloc(ptr, layout)
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

/// Peak bytes allocated above the starting level while sketching a generated
/// stream of `len` examples.
fn peak_extra(map: &RffMap, len: usize) -> usize {
    let base = LIVE.load(Ordering::SeqCst);
    PEAK.store(base, Ordering::SeqCst);
    let stream = (0..len).map(|i| {
        let t = i as f64 * 1e-3;
        ([t.sin(), t.cos()], i % 3)
    });
    let bank = sketch_stream(map, stream, 3, PriorMode::Empirical).unwrap();
    let peak = PEAK.load(Ordering::SeqCst) - base;
    drop(bank);
    peak
}

#[test]
fn peak_memory_independent_of_stream_length() {
    let map = RffMap::build(&FeatureMapSpec::rff(2, 256, 1.0, 1)).unwrap();
    let short = peak_extra(&map, 1_000);
    let long = peak_extra(&map, 100_000);
    assert_eq!(short, long);
    // Three sums plus one scratch vector, with room for bookkeeping.
    assert!(long <= 8 * 256 * 16, "{long} bytes");
}
