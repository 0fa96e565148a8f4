use sigpds::domains::Height;
use sigpds::format::{parse_system, SystemFile};
use sigpds::frontend::{Caps, RunError};

fn fixture(name: &str) -> SystemFile {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_system(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn caps() -> Caps {
    Caps::default()
}

#[test]
fn minheight_fixture() {
    let f = fixture("pex.pds");
    assert_eq!(f.minheight("p0", "g", "p3", &caps()).unwrap(), Height::Finite(6));
    assert_eq!(f.minheight("p0", "g", "p1", &caps()).unwrap(), Height::Infinite);
    assert_eq!(f.delta("p1", "g", "p3", &caps()).unwrap(), "4");
    assert!(f.reach_target("p1", "g g", "p2", "deep", &caps()).unwrap().reachable);
    assert!(!f.reach("p2", "g", "p2", "", &caps()).unwrap());
}

#[test]
fn relations_fixture() {
    let f = fixture("relations.pds");
    assert!(f.reach("main", "m", "f", "r", &caps()).unwrap());
    assert!(f.reach("main", "m r", "done", "", &caps()).unwrap());
    assert!(!f.reach("main", "m", "done", "", &caps()).unwrap());
    let t = f.reach_target("main", "m", "f", "ret", &caps()).unwrap();
    assert!(t.reachable, "{t:?}");
    assert!(!f.reach_target("main", "m", "main", "ret", &caps()).unwrap().reachable);
}

#[test]
fn conditional_fixture() {
    let f = fixture("conditional.pds");
    assert!(f.reach("p", "a a", "p", "", &caps()).unwrap());
    assert!(!f.reach("p", "a b a", "p", "", &caps()).unwrap());
    assert!(f.reach_target("p", "b", "q", "onea", &caps()).unwrap().reachable);
    assert!(!f.reach_target("p", "b b", "p", "onea", &caps()).unwrap().reachable);
    assert!(f.presat(&caps()).unwrap().legend.is_some());
}

#[test]
fn trpds_fixture() {
    let f = fixture("trpds.pds");
    assert!(f.trreach("p", "a a b", "q", "", &caps()).unwrap());
    assert!(!f.trreach("p", "a a a", "q", "", &caps()).unwrap());
    assert!(f.trreach("p", "a a a", "p", "b", &caps()).unwrap());
    assert!(matches!(f.reach_target("p", "a", "q", "x", &caps()), Err(RunError::Input(_) | RunError::Unsupported(_))));
}

#[test]
fn wspds_fixtures() {
    let f = fixture("wspds_finite.pds");
    assert!(f.cover("p", "c", "q", "", &caps()).unwrap());
    assert!(!f.cover("p", "a", "q", "", &caps()).unwrap());
    let v = fixture("wspds_vector.pds");
    assert!(v.cover("p", "(2,0)", "r", "(2,1)", &caps()).unwrap());
    assert!(!v.cover("p", "(2,0)", "r", "(2,2)", &caps()).unwrap());
    assert!(v.reach_target("p", "(2,0)", "r", "one", &caps()).unwrap().reachable);
    assert!(!v.reach_target("p", "(1,0)", "r", "one", &caps()).unwrap().reachable);
    assert!(matches!(v.reach("p", "(2,0)", "r", "", &caps()), Err(RunError::Unsupported(_))));
}

#[test]
fn caps_and_bad_input() {
    let f = fixture("conditional.pds");
    let tight = Caps { closure: 1, ..Caps::default() };
    assert!(matches!(f.presat(&tight), Err(RunError::Cap(_))));
    assert!(matches!(f.reach("p", "z", "p", "", &caps()), Err(RunError::Input(_))));
    assert!(matches!(f.reach("nowhere", "a", "p", "", &caps()), Err(RunError::Input(_))));
    assert!(matches!(f.minheight("p", "a", "p", &caps()), Err(RunError::Unsupported(_))));
}
