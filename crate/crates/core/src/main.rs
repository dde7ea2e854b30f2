fn main() {
    // die quietly when the output pipe closes (e.g. `conepredictor ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(conepredictor::cli::run(std::env::args_os()));
}
