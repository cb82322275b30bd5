fn main() -> anyhow::Result<()> {
    citeflow::cli::run(std::env::args_os())
}
