use std::thread;

/// Stack size for threads running deep evaluations.
pub const EVAL_STACK_BYTES: usize = 512 * 1024 * 1024;

/// Runs `f` on a fresh thread with a large stack and returns its result.
///
/// Both evaluators recurse once per fuel unit, so a program that needs most
/// of a large fuel budget can exceed the default thread stack.
pub fn with_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    thread::scope(|s| {
        thread::Builder::new()
            .stack_size(EVAL_STACK_BYTES)
            .spawn_scoped(s, f)
            .expect("failed to spawn evaluation thread")
            .join()
            .unwrap_or_else(|p| std::panic::resume_unwind(p))
    })
}
