fn main() {
    framesel::cli::main()
}
