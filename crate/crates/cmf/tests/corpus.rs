use cmf::constructors::{builtin, builtin_document, builtin_names};
use cmf::exprio::{dump_cmf, load_cmf, CmfDocument};
use cmf::{cmf_core::matrices_equal, ExactCmf};

#[test]
fn every_builtin_round_trips() {
    for name in builtin_names() {
        let b = builtin(name).unwrap();
        let text = dump_cmf(&b.cmf).to_toml().unwrap();
        let back: ExactCmf = load_cmf(&CmfDocument::from_toml(&text).unwrap()).unwrap();
        for i in 0..b.cmf.dim() {
            assert!(matrices_equal(b.cmf.generator(i), back.generator(i)), "{name} generator {}", i + 1);
        }
    }
}

/// The Apéry companion builtin is stored precomputed; this checks it (and
/// rewrites it when CMF_BLESS is set).
#[test]
fn apery_companion_corpus_is_current() {
    let zeta = builtin("zeta3").unwrap();
    let stored = builtin_document("apery_coboundary_A").unwrap();
    let a = stored.aux_matrix::<cmf::BigRat>("A").unwrap().unwrap();
    let applied = zeta.cmf.coboundary_apply(&a).unwrap();
    if std::env::var_os("CMF_BLESS").is_some() {
        let mut doc = dump_cmf(&applied);
        doc.name = stored.name.clone();
        doc.description = "zeta3 transformed by A so that its (1,1) trajectory is the companion matrix of Apery's recurrence.".into();
        doc.metadata.insert("coboundary_of".into(), "zeta3".into());
        doc.aux = stored.aux.clone();
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/v1/apery_coboundary_A.toml");
        std::fs::write(path, doc.to_toml().unwrap()).unwrap();
        return;
    }
    let b = builtin("apery_coboundary_A").unwrap();
    for i in 0..2 {
        assert!(matrices_equal(applied.generator(i), b.cmf.generator(i)));
    }
}
