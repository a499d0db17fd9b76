mod common;

use std::alloc::{GlobalAlloc, Layout, System};
use std::fs::File;
use std::io::{BufReader, Write};
use std::sync::atomic::{AtomicUsize, Ordering};

use common::{random_rows, xml_row};
use cqatag::ingest::parse_posts_stream;
use cqatag::rng::SeededRng;

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::SeqCst) + layout.size();
            PEAK.fetch_max(now, Ordering::SeqCst);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::SeqCst);
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

fn write_dump(path: &std::path::Path, copies: usize) {
    let rows = random_rows(&mut SeededRng::new(11), 2000);
    let mut f = std::io::BufWriter::new(File::create(path).unwrap());
    writeln!(f, "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>").unwrap();
    let stride = rows.last().unwrap().id + 1;
    for c in 0..copies as i64 {
        for r in &rows {
            let mut r = r.clone();
            r.id += c * stride;
            r.parent = r.parent.map(|p| p + c * stride);
            f.write_all(xml_row(&r).as_bytes()).unwrap();
        }
    }
    writeln!(f, "</posts>").unwrap();
}

/// Peak heap growth while streaming every post of `path` and dropping it.
fn stream_peak(path: &std::path::Path) -> (usize, u64) {
    let reader = BufReader::new(File::open(path).unwrap());
    let base = CURRENT.load(Ordering::SeqCst);
    PEAK.store(base, Ordering::SeqCst);
    let mut n = 0u64;
    let mut stream = parse_posts_stream(reader);
    for post in stream.by_ref() {
        post.unwrap();
        n += 1;
    }
    let report = stream.into_report();
    assert_eq!(report.yielded, n);
    (PEAK.load(Ordering::SeqCst) - base, n)
}

#[test]
fn parser_memory_does_not_grow_with_dump_size() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("small.xml");
    let large = dir.path().join("large.xml");
    write_dump(&small, 1);
    write_dump(&large, 10);
    let small_size = std::fs::metadata(&small).unwrap().len() as usize;

    let (peak1, n1) = stream_peak(&small);
    let (peak10, n10) = stream_peak(&large);
    assert_eq!(n10, 10 * n1);
    assert!(peak1 < small_size, "peak {peak1} not below dump size {small_size}");
    assert!(
        peak10 <= 2 * peak1 + 64 * 1024,
        "peak grew from {peak1} to {peak10} bytes for a 10x dump"
    );
}
