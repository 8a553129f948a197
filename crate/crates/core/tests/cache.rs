use std::fs;

use primon_core::primes::{load_table, save_table};
use primon_core::{Error, PrimeTable};

#[test]
fn round_trip_preserves_table_and_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("primes.bin");
    let t = PrimeTable::first(5_000, 128).unwrap();
    save_table(&t, &path).unwrap();
    let back = load_table(&path, 128).unwrap();
    assert_eq!(back.primes(), t.primes());
    assert_eq!(back.checksum(), t.checksum());
    assert_eq!(back.theta_prefix(), t.theta_prefix());
    assert_eq!(fs::metadata(&path).unwrap().len(), 20 + 16 * 5_000);
}

#[test]
fn corrupted_bytes_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("primes.bin");
    save_table(&PrimeTable::first(100, 64).unwrap(), &path).unwrap();
    let good = fs::read(&path).unwrap();

    let mut flipped = good.clone();
    flipped[40] ^= 1;
    fs::write(&path, &flipped).unwrap();
    assert!(matches!(load_table(&path, 64), Err(Error::Format(_))));

    fs::write(&path, &good[..good.len() - 3]).unwrap();
    assert!(matches!(load_table(&path, 64), Err(Error::Format(_))));

    let mut magic = good.clone();
    magic[0] = b'X';
    fs::write(&path, &magic).unwrap();
    assert!(matches!(load_table(&path, 64), Err(Error::Format(_))));
}

#[test]
fn missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_table(&dir.path().join("absent.bin"), 64).is_err());
}
