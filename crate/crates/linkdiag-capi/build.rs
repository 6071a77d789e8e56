use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let out = PathBuf::from(env::var("OUT_DIR").unwrap()).join("linkdiag.h");
    let committed = crate_dir.join("include/linkdiag.h");

    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    println!("cargo:rerun-if-changed=include/linkdiag.h");

    let bindings = cbindgen::generate(&crate_dir).expect("header generation");
    bindings.write_to_file(&out);

    // keep the committed header in lockstep with the source
    let fresh = std::fs::read(&out).unwrap();
    if std::fs::read(&committed).ok().as_deref() != Some(fresh.as_slice()) {
        std::fs::write(&committed, fresh).expect("update committed header");
    }
}
