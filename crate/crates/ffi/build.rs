fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    // Header generation is opt-in (`--features generate-header`) so that
    // downstream builds do not pay for cbindgen's dependency tree. The
    // output is committed at include/bdslab.h.
    #[cfg(feature = "generate-header")]
    {
        let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR");
        let config =
            cbindgen::Config::from_file(std::path::Path::new(&crate_dir).join("cbindgen.toml"))
                .expect("reading cbindgen.toml");
        cbindgen::Builder::new()
            .with_crate(&crate_dir)
            .with_config(config)
            .generate()
            .expect("generating C header")
            .write_to_file(std::path::Path::new(&crate_dir).join("include/bdslab.h"));
    }
}
