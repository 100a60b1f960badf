fn main() {
    std::process::exit(hdl_core::cli::main());
}
