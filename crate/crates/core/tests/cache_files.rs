use curvlab::cache::{cache_file_name, cached_metric, read_cache, to_bytes, write_cache, MAGIC};
use curvlab::heisenberg::make_heisenberg;
use curvlab::houghton::make_h2;
use curvlab::lamplighter::{make_l2, make_wreath_cyclic};
use curvlab::{bfs_metric, Group, DEFAULT_BUDGET};

fn round_trip<G: Group>(group: &G, horizon: u32) {
    let dir = tempfile::tempdir().unwrap();
    let fresh = bfs_metric(group, horizon, DEFAULT_BUDGET).unwrap();
    let loaded = cached_metric(group, horizon, DEFAULT_BUDGET, dir.path()).unwrap();
    assert_eq!(loaded, fresh);
    let path = dir.path().join(cache_file_name(&group.id(), horizon));
    let on_disk = std::fs::read(&path).unwrap();
    assert_eq!(&on_disk[..4], MAGIC);
    assert_eq!(on_disk, to_bytes(group, &fresh));
    let again = read_cache(group, &path).unwrap();
    assert_eq!(to_bytes(group, &again), on_disk);
}

#[test]
fn every_builtin_family_round_trips() {
    round_trip(&make_l2(), 6);
    round_trip(&make_wreath_cyclic(3), 4);
    round_trip(&make_h2(), 6);
    round_trip(&make_heisenberg(), 5);
}

#[test]
fn corrupt_file_is_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let l2 = make_l2();
    let path = dir.path().join(cache_file_name(&l2.id(), 5));
    std::fs::write(&path, b"CVLB garbage").unwrap();
    let table = cached_metric(&l2, 5, DEFAULT_BUDGET, dir.path()).unwrap();
    assert_eq!(table, bfs_metric(&l2, 5, DEFAULT_BUDGET).unwrap());
    assert!(read_cache(&l2, &path).is_ok());
}

#[test]
fn explicit_write_then_read() {
    let dir = tempfile::tempdir().unwrap();
    let h2 = make_h2();
    let table = bfs_metric(&h2, 5, DEFAULT_BUDGET).unwrap();
    let path = dir.path().join("nested/h2.cvlb");
    write_cache(&h2, &table, &path).unwrap();
    assert_eq!(read_cache(&h2, &path).unwrap(), table);
    assert!(read_cache(&make_l2(), &path).is_err());
}
