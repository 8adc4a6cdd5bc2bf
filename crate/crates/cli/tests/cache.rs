use std::fs;

use iwasawa_cli::cache::{CacheEntry, CacheKey, DiskCache, Lookup, CACHE_SCHEMA_VERSION};
use iwasawa_core::iwasawa::{ApproximantKey, ApproximantStore};
use iwasawa_core::padic::teichmuller;

fn teichmuller_table(p: u64, precision: u32) -> Vec<u64> {
    (1..p).map(|a| teichmuller::<u64>(a as i64, p, precision).unwrap().residue()).collect()
}

fn teichmuller_entry(cache: &DiskCache) -> CacheEntry {
    CacheEntry::new(cache.key(37, "teichmuller", vec![4]), teichmuller_table(37, 4))
}

#[test]
fn roundtrip_returns_identical_payload() {
    let dir = tempfile::tempdir().unwrap();
    let cache = DiskCache::open(dir.path()).unwrap();
    let entry = teichmuller_entry(&cache);
    assert_eq!(entry.payload.len(), 36);
    let back = cache.roundtrip(&entry).unwrap();
    assert_eq!(back, entry);
    assert!(back.verify());
}

#[test]
fn version_bump_invalidates_entries() {
    let dir = tempfile::tempdir().unwrap();
    let old = DiskCache::open(dir.path()).unwrap();
    let entry = teichmuller_entry(&old);
    old.write(&entry).unwrap();

    let bumped = DiskCache::open_with_version(dir.path(), CACHE_SCHEMA_VERSION + 1).unwrap();
    let key = bumped.key(37, "teichmuller", vec![4]);
    assert!(matches!(bumped.read(&key), Lookup::Rejected(_)));

    let mut computed = false;
    let payload = bumped
        .get_or_compute(&key, || {
            computed = true;
            Ok(teichmuller_table(37, 4))
        })
        .unwrap();
    assert!(computed);
    assert_eq!(payload, entry.payload);
    assert_eq!(bumped.read(&key), Lookup::Hit(payload));
    assert_eq!(bumped.stats().rejected, 2);
}

#[test]
fn flipped_payload_byte_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let cache = DiskCache::open(dir.path()).unwrap();
    let entry = teichmuller_entry(&cache);
    cache.write(&entry).unwrap();

    let path = cache.path_of(&entry.key);
    let mut bytes = fs::read(&path).unwrap();
    // first digit of the payload array
    let at = bytes.windows(11).position(|w| w == b"\"payload\":[").unwrap() + 11;
    bytes[at] = if bytes[at] == b'1' { b'2' } else { b'1' };
    fs::write(&path, bytes).unwrap();

    assert!(matches!(cache.read(&entry.key), Lookup::Rejected(_)));
    let payload = cache.get_or_compute(&entry.key, || Ok(teichmuller_table(37, 4))).unwrap();
    assert_eq!(payload, entry.payload);
    assert_eq!(cache.read(&entry.key), Lookup::Hit(entry.payload.clone()));
}

#[test]
fn truncated_file_is_a_rejection_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cache = DiskCache::open(dir.path()).unwrap();
    let entry = teichmuller_entry(&cache);
    cache.write(&entry).unwrap();
    let path = cache.path_of(&entry.key);
    let bytes = fs::read(&path).unwrap();
    fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert!(matches!(cache.read(&entry.key), Lookup::Rejected(_)));
}

#[test]
fn misfiled_entry_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cache = DiskCache::open(dir.path()).unwrap();
    let entry = teichmuller_entry(&cache);
    cache.write(&entry).unwrap();
    let other = CacheKey::new(37, "teichmuller", vec![5]);
    fs::copy(cache.path_of(&entry.key), cache.path_of(&other)).unwrap();
    assert!(matches!(cache.read(&other), Lookup::Rejected(_)));
}

#[test]
fn unwritable_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("not-a-dir");
    fs::write(&file, b"x").unwrap();
    let err = DiskCache::open(file.join("cache")).err().expect("open must fail");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn approximant_store_hook() {
    let dir = tempfile::tempdir().unwrap();
    let cache = DiskCache::open(dir.path()).unwrap();
    let key = ApproximantKey { p: 7, i: 3, level: 1, precision: 2 };
    assert_eq!(cache.load(&key), None);
    cache.store(&key, &[1, 2, 3, 4, 5, 6, 7]);
    assert_eq!(cache.load(&key), Some(vec![1, 2, 3, 4, 5, 6, 7]));
}
