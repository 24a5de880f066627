fn main() {
    let (code, text) = qkz_lab::run(std::env::args_os());
    if code == qkz_lab::EXIT_CONFIG && !text.trim_start().starts_with('{') {
        eprint!("{text}");
    } else {
        print!("{text}");
    }
    std::process::exit(code);
}
