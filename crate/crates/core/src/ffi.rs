//! C-compatible boundary for language bindings.
//!
//! Configs cross as JSON strings and observations as flat `f64` arrays. A
//! handle owns one [`AntEnv`]. Functions returning `c_int` use the status
//! codes below; the message for the most recent failure on the calling
//! thread is available from [`antdyn_last_error`].
//!
//! Action indices follow [`Action`]: 0 forward, 1 backward, 2 turn left,
//! 3 turn right.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;
use std::sync::Arc;

use serde::Serialize;

use crate::arena::Action;
use crate::env::{AntEnv, EnvConfig, World};
use crate::error::{Error, ErrorKind};
use crate::recording::load_recording;
use crate::sensing::OBS_LEN;

/// Registry name for the environment.
pub const ENV_ID: &str = "AntDynamics-v0";

pub const STATUS_OK: c_int = 0;
pub const STATUS_DATA: c_int = 2;
pub const STATUS_CONFIG: c_int = 3;
pub const STATUS_CONTRACT: c_int = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

fn status_of(err: &Error) -> c_int {
    set_error(err.to_string());
    match err.kind() {
        ErrorKind::Data => STATUS_DATA,
        ErrorKind::Config => STATUS_CONFIG,
        ErrorKind::Contract => STATUS_CONTRACT,
    }
}

fn contract(message: impl Into<String>) -> c_int {
    set_error(message);
    STATUS_CONTRACT
}

/// An environment instance owned by the caller.
pub struct EnvHandle {
    env: AntEnv,
    info: CString,
}

#[derive(Serialize)]
struct ResetInfo {
    target_ant_id: u64,
    start_time: f64,
    target_x: f64,
    target_y: f64,
}

impl EnvHandle {
    pub fn env(&self) -> &AntEnv {
        &self.env
    }

    fn set_info(&mut self, info: &impl Serialize) {
        let json = serde_json::to_string(info).expect("info serializes");
        self.info = CString::new(json).expect("json has no nul bytes");
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, c_int> {
    if p.is_null() {
        return Err(contract(format!("{name} must not be null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| contract(format!("{name} is not valid UTF-8")))
}

/// Builds an environment from an env-config JSON string and a recording
/// bundle path. Returns null on failure.
///
/// # Safety
/// Both pointers must be null or point to NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn antdyn_create(
    config_json: *const c_char,
    data_path: *const c_char,
) -> *mut EnvHandle {
    let build = || -> Result<EnvHandle, c_int> {
        let json = str_arg(config_json, "config_json")?;
        let path = str_arg(data_path, "data_path")?;
        let config = EnvConfig::from_json(json).map_err(|e| status_of(&e.into()))?;
        let recording = load_recording(path).map_err(|e| status_of(&e.into()))?;
        let world = World::new(config, &recording).map_err(|e| status_of(&e))?;
        Ok(EnvHandle {
            env: AntEnv::new(Arc::new(world)),
            info: CString::default(),
        })
    };
    match build() {
        Ok(h) => Box::into_raw(Box::new(h)),
        Err(_) => ptr::null_mut(),
    }
}

/// Starts an episode and writes the 13 observation values to `obs_out`.
///
/// # Safety
/// `handle` must come from [`antdyn_create`] and not be destroyed;
/// `obs_out` must be valid for 13 writes.
#[no_mangle]
pub unsafe extern "C" fn antdyn_reset(
    handle: *mut EnvHandle,
    seed: u64,
    obs_out: *mut f64,
) -> c_int {
    let Some(h) = handle.as_mut() else {
        return contract("handle must not be null");
    };
    if obs_out.is_null() {
        return contract("obs_out must not be null");
    }
    match h.env.reset(seed) {
        Ok(obs) => {
            ptr::copy_nonoverlapping(obs.0.as_ptr(), obs_out, OBS_LEN);
            let ep = h.env.episode().expect("reset stores an episode");
            let start = ep.target.trail[0];
            h.set_info(&ResetInfo {
                target_ant_id: ep.target.ant_id,
                start_time: ep.target.start_time,
                target_x: start.x,
                target_y: start.y,
            });
            STATUS_OK
        }
        Err(e) => status_of(&e),
    }
}

/// Advances the episode. Writes the observation, the step reward and the
/// `[terminated, truncated]` flags; the info map is then available from
/// [`antdyn_info`].
///
/// # Safety
/// `handle` must come from [`antdyn_create`] and not be destroyed;
/// `obs_out` must be valid for 13 writes, `reward_out` for one and
/// `flags_out` for two.
#[no_mangle]
pub unsafe extern "C" fn antdyn_step(
    handle: *mut EnvHandle,
    action: i64,
    obs_out: *mut f64,
    reward_out: *mut f64,
    flags_out: *mut u8,
) -> c_int {
    let Some(h) = handle.as_mut() else {
        return contract("handle must not be null");
    };
    if obs_out.is_null() || reward_out.is_null() || flags_out.is_null() {
        return contract("output pointers must not be null");
    }
    let Some(action) = usize::try_from(action).ok().and_then(Action::from_index) else {
        return contract(format!("action must be in 0..=3, got {action}"));
    };
    match h.env.step(action) {
        Ok(r) => {
            ptr::copy_nonoverlapping(r.observation.0.as_ptr(), obs_out, OBS_LEN);
            *reward_out = r.reward;
            *flags_out = u8::from(r.terminated);
            *flags_out.add(1) = u8::from(r.truncated);
            h.set_info(&r.info);
            STATUS_OK
        }
        Err(e) => status_of(&e),
    }
}

/// JSON info map of the last successful reset or step. The pointer stays
/// valid until the next call on the same handle.
///
/// # Safety
/// `handle` must come from [`antdyn_create`] and not be destroyed.
#[no_mangle]
pub unsafe extern "C" fn antdyn_info(handle: *const EnvHandle) -> *const c_char {
    match handle.as_ref() {
        Some(h) => h.info.as_ptr(),
        None => ptr::null(),
    }
}

/// Steps per episode, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or come from [`antdyn_create`] and not be destroyed.
#[no_mangle]
pub unsafe extern "C" fn antdyn_episode_steps(handle: *const EnvHandle) -> u64 {
    handle.as_ref().map_or(0, |h| h.env.world().steps() as u64)
}

/// Frees a handle. Null is ignored.
///
/// # Safety
/// `handle` must be null or come from [`antdyn_create`], and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn antdyn_destroy(handle: *mut EnvHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Message of the most recent failure on this thread (empty if none).
#[no_mangle]
pub extern "C" fn antdyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn antdyn_obs_len() -> u64 {
    OBS_LEN as u64
}

#[no_mangle]
pub extern "C" fn antdyn_n_actions() -> u64 {
    Action::ALL.len() as u64
}

/// Last error message as an owned string.
pub fn last_error_message() -> String {
    LAST_ERROR.with(|e| e.borrow().to_string_lossy().into_owned())
}
