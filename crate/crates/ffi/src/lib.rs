//! C ABI over the game solvers and reductions.
//!
//! All functions follow the same conventions: opaque handles own their
//! data and are released with the matching `_free` function, outputs are
//! written through out-pointers only on [`Status::Ok`], and the last
//! error message of the calling thread is available via
//! [`pg2ssg_last_error_message`]. Strings returned by this library are
//! NUL-terminated, UTF-8, and must be released with
//! [`pg2ssg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pg2ssg::arena::VertexId;
use pg2ssg::error::Error;
use pg2ssg::io::format::{parse_parity, parse_ssg, print_ssg, ParityGame};
use pg2ssg::parity::solve_parity;
use pg2ssg::reduction::reduce_parity_to_ssg;
use pg2ssg::ssg::{solve_ssg_strategy_improvement, Ssg, ValueVector};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidGame = 4,
    Unsupported = 5,
    InternalError = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', "?"))
        .unwrap_or_else(|_| CString::new("invalid error message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(error: &Error) -> Status {
    match error {
        Error::Parse { .. } => Status::ParseError,
        Error::InvalidArena(_) | Error::Semantic(_) | Error::NotTotal { .. } => Status::InvalidGame,
        Error::NotTwoPlayer(_)
        | Error::NotStopping
        | Error::NonDyadic(_)
        | Error::BudgetExceeded { .. } => Status::Unsupported,
        _ => Status::InternalError,
    }
}

fn fail(error: Error) -> Status {
    let status = status_of(&error);
    set_error(error.to_string());
    status
}

fn guard(body: impl FnOnce() -> Status) -> Status {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic across the FFI boundary".into());
            Status::InternalError
        }
    }
}

fn guard_value<T: Default>(body: impl FnOnce() -> T) -> T {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_default()
}

/// Message describing the most recent error on this thread, or NULL. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pg2ssg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a function of this library and not yet
/// freed; NULL is accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn utf8_arg<'a>(text: *const c_char) -> Result<&'a str, Status> {
    if text.is_null() {
        set_error("NULL text argument".into());
        return Err(Status::NullArgument);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("text is not valid UTF-8".into());
        Status::InvalidUtf8
    })
}

fn export_string(s: String, out: *mut *mut c_char) -> Status {
    match CString::new(s) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            Status::Ok
        }
        Err(_) => {
            set_error("output contains an interior NUL".into());
            Status::InternalError
        }
    }
}

/// Opaque parity game handle.
pub struct ParityHandle {
    game: ParityGame,
}

/// Opaque simple stochastic game handle.
pub struct GameHandle {
    ssg: Ssg,
}

/// Opaque vector of exact per-vertex values.
pub struct ValuesHandle {
    values: ValueVector,
}

/// Parses a parity game document into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_parity_parse(
    text: *const c_char,
    out: *mut *mut ParityHandle,
) -> Status {
    guard(|| {
        if out.is_null() {
            set_error("NULL out pointer".into());
            return Status::NullArgument;
        }
        let text = match utf8_arg(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_parity(text) {
            Ok(game) => {
                *out = Box::into_raw(Box::new(ParityHandle { game }));
                Status::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `handle` must come from `pg2ssg_parity_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_parity_free(handle: *mut ParityHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of vertices, or 0 for NULL.
///
/// # Safety
/// `handle` must be a live parity handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_parity_vertex_count(handle: *const ParityHandle) -> usize {
    handle.as_ref().map_or(0, |h| h.game.arena.num_vertices())
}

/// Solves the parity game; `winners` receives one byte per vertex, 0 where
/// Eve wins and 1 where Adam does.
///
/// # Safety
/// `handle` must be live and `winners` must point at at least
/// `pg2ssg_parity_vertex_count(handle)` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_parity_solve(
    handle: *const ParityHandle,
    winners: *mut u8,
) -> Status {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            set_error("NULL game handle".into());
            return Status::NullArgument;
        };
        if winners.is_null() {
            set_error("NULL winners buffer".into());
            return Status::NullArgument;
        }
        match solve_parity(&h.game.arena, &h.game.priorities) {
            Ok(regions) => {
                for v in h.game.arena.vertices() {
                    *winners.add(v.index()) = if regions.eve_wins_from(v) { 0 } else { 1 };
                }
                Status::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Builds the direct gadget reduction of a parity game.
///
/// # Safety
/// `handle` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_reduce_direct(
    handle: *const ParityHandle,
    out: *mut *mut GameHandle,
) -> Status {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            set_error("NULL game handle".into());
            return Status::NullArgument;
        };
        if out.is_null() {
            set_error("NULL out pointer".into());
            return Status::NullArgument;
        }
        match reduce_parity_to_ssg(&h.game.arena, &h.game.priorities) {
            Ok((ssg, ..)) => {
                *out = Box::into_raw(Box::new(GameHandle { ssg }));
                Status::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Builds the three-step reduction of a parity game.
///
/// # Safety
/// `handle` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_reduce_chain(
    handle: *const ParityHandle,
    out: *mut *mut GameHandle,
) -> Status {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            set_error("NULL game handle".into());
            return Status::NullArgument;
        };
        if out.is_null() {
            set_error("NULL out pointer".into());
            return Status::NullArgument;
        }
        match pg2ssg::chain::chain_reduce(&h.game.arena, &h.game.priorities) {
            Ok(chain) => {
                *out = Box::into_raw(Box::new(GameHandle { ssg: chain.ssg }));
                Status::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parses a simple stochastic game document.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_game_parse(
    text: *const c_char,
    out: *mut *mut GameHandle,
) -> Status {
    guard(|| {
        if out.is_null() {
            set_error("NULL out pointer".into());
            return Status::NullArgument;
        }
        let text = match utf8_arg(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_ssg(text) {
            Ok(ssg) => {
                *out = Box::into_raw(Box::new(GameHandle { ssg }));
                Status::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `handle` must come from a reduce or parse call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_game_free(handle: *mut GameHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of vertices, or 0 for NULL.
///
/// # Safety
/// `handle` must be a live game handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_game_vertex_count(handle: *const GameHandle) -> usize {
    handle.as_ref().map_or(0, |h| h.ssg.arena.num_vertices())
}

/// Copy of a source-game vertex inside a reduced game, or `SIZE_MAX` when
/// the game does not embed that vertex.
///
/// # Safety
/// `handle` must be a live game handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_game_embedded(
    handle: *const GameHandle,
    source_vertex: usize,
) -> usize {
    handle
        .as_ref()
        .and_then(|h| h.ssg.embedded(VertexId(source_vertex)))
        .map_or(usize::MAX, |v| v.index())
}

/// Renders the canonical document of a game into a new string.
///
/// # Safety
/// `handle` must be live and `out` a valid pointer; release the string
/// with `pg2ssg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_game_print(
    handle: *const GameHandle,
    out: *mut *mut c_char,
) -> Status {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            set_error("NULL game handle".into());
            return Status::NullArgument;
        };
        if out.is_null() {
            set_error("NULL out pointer".into());
            return Status::NullArgument;
        }
        export_string(print_ssg(&h.ssg), out)
    })
}

/// Total stored size of the game in bits, or 0 on error.
///
/// # Safety
/// `handle` must be a live game handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_game_size_bits(handle: *const GameHandle) -> u64 {
    guard_value(|| {
        handle
            .as_ref()
            .and_then(|h| pg2ssg::arena::size_of(&h.ssg.arena).ok())
            .map_or(0, |report| report.total_bits)
    })
}

/// Solves a stopping game exactly by strategy improvement.
///
/// # Safety
/// `handle` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_game_solve(
    handle: *const GameHandle,
    out: *mut *mut ValuesHandle,
) -> Status {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            set_error("NULL game handle".into());
            return Status::NullArgument;
        };
        if out.is_null() {
            set_error("NULL out pointer".into());
            return Status::NullArgument;
        }
        match solve_ssg_strategy_improvement(&h.ssg) {
            Ok(solution) => {
                *out = Box::into_raw(Box::new(ValuesHandle {
                    values: solution.values,
                }));
                Status::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `handle` must come from `pg2ssg_game_solve` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_values_free(handle: *mut ValuesHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of values, or 0 for NULL.
///
/// # Safety
/// `handle` must be a live values handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_values_len(handle: *const ValuesHandle) -> usize {
    handle.as_ref().map_or(0, |h| h.values.len())
}

/// The exact value of one vertex as a `num/den` string.
///
/// # Safety
/// `handle` must be live and `out` a valid pointer; release the string
/// with `pg2ssg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_values_get(
    handle: *const ValuesHandle,
    vertex: usize,
    out: *mut *mut c_char,
) -> Status {
    guard(|| {
        let Some(h) = handle.as_ref() else {
            set_error("NULL values handle".into());
            return Status::NullArgument;
        };
        if out.is_null() {
            set_error("NULL out pointer".into());
            return Status::NullArgument;
        }
        if vertex >= h.values.len() {
            set_error(format!("vertex {vertex} out of range"));
            return Status::InvalidGame;
        }
        export_string(h.values.value(VertexId(vertex)).to_string(), out)
    })
}

/// 1 if the value at `vertex` is at least one half, 0 if below, -1 on a
/// NULL handle or out-of-range vertex.
///
/// # Safety
/// `handle` must be a live values handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn pg2ssg_values_at_least_half(
    handle: *const ValuesHandle,
    vertex: usize,
) -> i32 {
    let Some(h) = handle.as_ref() else { return -1 };
    if vertex >= h.values.len() {
        return -1;
    }
    i32::from(h.values.at_least_half(VertexId(vertex)))
}
