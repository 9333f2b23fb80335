//! C ABI for the group engine.
//!
//! Groups and elements cross the boundary as opaque pointers owned by the
//! library: every constructor has a matching `*_free`, and strings
//! returned by the `*_json` functions must be released with
//! [`iw_string_free`]. Fallible functions return null (or a negative
//! sentinel) and record a status and message readable through
//! [`iw_last_error_status`] and [`iw_last_error_message`] until the next
//! failure on the same thread.
//!
//! All pointer arguments must be valid for the duration of the call;
//! passing null where a value is required fails with
//! `IW_STATUS_NULL_ARGUMENT` rather than crashing.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use iwahori::cli;
use iwahori::cosets::{self, CosetError};
use iwahori::iwahori_weyl::{
    ExtAffineElement, GroupDatum, GroupError, LatticeSpec, DEFAULT_ELEMENT_CAP,
};
use iwahori::rootsys::CartanType;
use serde_json::json;

/// Outcome of the most recent fallible call on this thread.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IwStatus {
    /// No failure recorded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Input failed to parse or validate.
    InvalidInput = 2,
    /// An enumeration outgrew its element cap.
    CapExceeded = 3,
    /// The requested parabolic subgroup is infinite.
    InfiniteSubgroup = 4,
}

/// An extended affine Weyl group with a fixed lattice datum.
pub struct IwGroup {
    datum: GroupDatum,
}

/// An element of an IwGroup. Elements remember which group made them;
/// using one with a different group fails cleanly.
pub struct IwElement {
    inner: ExtAffineElement,
}

thread_local! {
    static LAST_ERROR: RefCell<(IwStatus, CString)> =
        RefCell::new((IwStatus::Ok, CString::default()));
}

fn set_error(status: IwStatus, message: &str) {
    let message = CString::new(message.replace('\0', "?"))
        .unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = (status, message));
}

fn group_error(e: &GroupError) -> IwStatus {
    match e {
        GroupError::CapExceeded { .. } => IwStatus::CapExceeded,
        _ => IwStatus::InvalidInput,
    }
}

fn coset_error(e: &CosetError) -> IwStatus {
    match e {
        CosetError::NotFinite { .. } => IwStatus::InfiniteSubgroup,
        CosetError::Group(g) => group_error(g),
        _ => IwStatus::InvalidInput,
    }
}

unsafe fn group_ref<'a>(group: *const IwGroup) -> Option<&'a IwGroup> {
    if group.is_null() {
        set_error(IwStatus::NullArgument, "group is null");
        return None;
    }
    Some(&*group)
}

unsafe fn element_ref<'a>(element: *const IwElement) -> Option<&'a IwElement> {
    if element.is_null() {
        set_error(IwStatus::NullArgument, "element is null");
        return None;
    }
    Some(&*element)
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Option<&'a str> {
    if s.is_null() {
        set_error(IwStatus::NullArgument, &format!("{what} is null"));
        return None;
    }
    match CStr::from_ptr(s).to_str() {
        Ok(t) => Some(t),
        Err(_) => {
            set_error(IwStatus::InvalidInput, &format!("{what} is not valid UTF-8"));
            None
        }
    }
}

fn boxed_element(inner: ExtAffineElement) -> *mut IwElement {
    Box::into_raw(Box::new(IwElement { inner }))
}

fn out_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', "?"))
        .unwrap_or_else(|_| CString::new("").unwrap())
        .into_raw()
}

/// Status of the most recent failed call on this thread, `IW_STATUS_OK`
/// if nothing has failed yet.
#[no_mangle]
pub extern "C" fn iw_last_error_status() -> IwStatus {
    LAST_ERROR.with(|e| e.borrow().0)
}

/// Message of the most recent failed call on this thread. The pointer
/// stays valid until the next failure on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn iw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().1.as_ptr())
}

/// Frees a string returned by one of the `*_json` functions. Null is
/// ignored.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn iw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the group for a Cartan type ("A2", "g2", ...) and a lattice
/// preset ("coroot" or "coweight"; null means coroot). Returns null on
/// invalid input.
///
/// # Safety
/// `cartan_type` (and `lattice`, when non-null) must point to
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn iw_group_new(
    cartan_type: *const c_char,
    lattice: *const c_char,
) -> *mut IwGroup {
    let Some(type_name) = str_arg(cartan_type, "cartan_type") else {
        return std::ptr::null_mut();
    };
    let spec = if lattice.is_null() {
        LatticeSpec::Coroot
    } else {
        match str_arg(lattice, "lattice") {
            Some("coroot") => LatticeSpec::Coroot,
            Some("coweight") => LatticeSpec::Coweight,
            Some(other) => {
                set_error(
                    IwStatus::InvalidInput,
                    &format!("unknown lattice preset \"{other}\""),
                );
                return std::ptr::null_mut();
            }
            None => return std::ptr::null_mut(),
        }
    };
    let ct = match CartanType::parse(type_name) {
        Ok(ct) => ct,
        Err(e) => {
            set_error(IwStatus::InvalidInput, &e.to_string());
            return std::ptr::null_mut();
        }
    };
    match GroupDatum::new(ct, spec) {
        Ok(datum) => Box::into_raw(Box::new(IwGroup { datum })),
        Err(e) => {
            set_error(IwStatus::InvalidInput, &e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Builds a group from the same JSON document the command line accepts,
/// e.g. {"cartan_type": "A1", "lattice": {"basis": [[1]], "torsion": [2]}}.
///
/// # Safety
/// `json` must point to a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn iw_group_from_json(json: *const c_char) -> *mut IwGroup {
    let Some(text) = str_arg(json, "datum JSON") else {
        return std::ptr::null_mut();
    };
    match GroupDatum::from_json(text) {
        Ok(datum) => Box::into_raw(Box::new(IwGroup { datum })),
        Err(e) => {
            set_error(IwStatus::InvalidInput, &e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Frees a group. Elements made from it stay valid for `iw_element_free`
/// but must not be used with other groups. Null is ignored.
///
/// # Safety
/// `group` must have come from a group constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn iw_group_free(group: *mut IwGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Rank of the underlying finite root system, 0 on a null group.
///
/// # Safety
/// `group` must be null or a live group pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_group_rank(group: *const IwGroup) -> u32 {
    match group_ref(group) {
        Some(g) => g.datum.rank() as u32,
        None => 0,
    }
}

/// Invariants of the group as a JSON object (type, Weyl group order,
/// component group order, invariant factors, torsion orders). Free with
/// `iw_string_free`.
///
/// # Safety
/// `group` must be null or a live group pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_group_info_json(group: *const IwGroup) -> *mut c_char {
    match group_ref(group) {
        Some(g) => out_string(cli::info_object(&g.datum).to_string()),
        None => std::ptr::null_mut(),
    }
}

/// The identity element.
///
/// # Safety
/// `group` must be null or a live group pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_element_identity(group: *const IwGroup) -> *mut IwElement {
    match group_ref(group) {
        Some(g) => boxed_element(g.datum.identity()),
        None => std::ptr::null_mut(),
    }
}

/// Parses the element syntax used by the command line, e.g.
/// "t=1,0 w=1,2 tor=0"; any part may be omitted.
///
/// # Safety
/// `group` and `spec` must be valid for the call.
#[no_mangle]
pub unsafe extern "C" fn iw_element_parse(
    group: *const IwGroup,
    spec: *const c_char,
) -> *mut IwElement {
    let Some(g) = group_ref(group) else { return std::ptr::null_mut() };
    let Some(text) = str_arg(spec, "element spec") else {
        return std::ptr::null_mut();
    };
    match cli::parse_element(&g.datum, text) {
        Ok(x) => boxed_element(x),
        Err(e) => {
            set_error(IwStatus::InvalidInput, &e);
            std::ptr::null_mut()
        }
    }
}

/// The affine simple reflection `s_index`, 0 being the affine node.
///
/// # Safety
/// `group` must be null or a live group pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_element_simple(group: *const IwGroup, index: u32) -> *mut IwElement {
    let Some(g) = group_ref(group) else { return std::ptr::null_mut() };
    match g.datum.affine_simple_reflection(index as usize) {
        Ok(s) => boxed_element(s.clone()),
        Err(e) => {
            set_error(IwStatus::InvalidInput, &e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// The translation by a lattice vector given in lattice coordinates.
/// `coords` must hold `len` entries and `len` must equal the rank.
///
/// # Safety
/// `coords` must point to `len` readable values (null only when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn iw_element_translation(
    group: *const IwGroup,
    coords: *const i64,
    len: usize,
) -> *mut IwElement {
    let Some(g) = group_ref(group) else { return std::ptr::null_mut() };
    if coords.is_null() && len > 0 {
        set_error(IwStatus::NullArgument, "coords is null");
        return std::ptr::null_mut();
    }
    let lambda: &[i64] =
        if len == 0 { &[] } else { std::slice::from_raw_parts(coords, len) };
    match g.datum.translation(lambda) {
        Ok(x) => boxed_element(x),
        Err(e) => {
            set_error(group_error(&e), &e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// The product `a * b`.
///
/// # Safety
/// All pointers must be null or live pointers from this library.
#[no_mangle]
pub unsafe extern "C" fn iw_element_mul(
    group: *const IwGroup,
    a: *const IwElement,
    b: *const IwElement,
) -> *mut IwElement {
    let (Some(g), Some(a), Some(b)) = (group_ref(group), element_ref(a), element_ref(b))
    else {
        return std::ptr::null_mut();
    };
    match g.datum.multiply(&a.inner, &b.inner) {
        Ok(x) => boxed_element(x),
        Err(e) => {
            set_error(group_error(&e), &e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// The inverse of `x`.
///
/// # Safety
/// All pointers must be null or live pointers from this library.
#[no_mangle]
pub unsafe extern "C" fn iw_element_inverse(
    group: *const IwGroup,
    x: *const IwElement,
) -> *mut IwElement {
    let (Some(g), Some(x)) = (group_ref(group), element_ref(x)) else {
        return std::ptr::null_mut();
    };
    match g.datum.invert(&x.inner) {
        Ok(y) => boxed_element(y),
        Err(e) => {
            set_error(group_error(&e), &e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// 1 if the elements are equal, 0 if not, -1 on a null argument.
///
/// # Safety
/// All pointers must be null or live pointers from this library.
#[no_mangle]
pub unsafe extern "C" fn iw_element_eq(a: *const IwElement, b: *const IwElement) -> i32 {
    let (Some(a), Some(b)) = (element_ref(a), element_ref(b)) else { return -1 };
    i32::from(a.inner == b.inner)
}

/// The word length of `x`, -1 on error.
///
/// # Safety
/// All pointers must be null or live pointers from this library.
#[no_mangle]
pub unsafe extern "C" fn iw_element_length(group: *const IwGroup, x: *const IwElement) -> i64 {
    let (Some(g), Some(x)) = (group_ref(group), element_ref(x)) else { return -1 };
    if !g.datum.owns(&x.inner) {
        set_error(IwStatus::InvalidInput, "element belongs to a different group");
        return -1;
    }
    g.datum.length(&x.inner) as i64
}

/// Canonical reduced word of `x` as a JSON object
/// {"word": [...], "omega": k, "length": n}. Free with `iw_string_free`.
///
/// # Safety
/// All pointers must be null or live pointers from this library.
#[no_mangle]
pub unsafe extern "C" fn iw_element_reduced_word_json(
    group: *const IwGroup,
    x: *const IwElement,
) -> *mut c_char {
    let (Some(g), Some(x)) = (group_ref(group), element_ref(x)) else {
        return std::ptr::null_mut();
    };
    if !g.datum.owns(&x.inner) {
        set_error(IwStatus::InvalidInput, "element belongs to a different group");
        return std::ptr::null_mut();
    }
    let (word, omega) = g.datum.reduced_word(&x.inner);
    let obj = json!({
        "word": word,
        "omega": g.datum.omega_index(&omega),
        "length": word.len(),
    });
    out_string(obj.to_string())
}

/// Component class of `x` as a JSON object {"free": [...], "torsion": [...]}.
/// Free with `iw_string_free`.
///
/// # Safety
/// All pointers must be null or live pointers from this library.
#[no_mangle]
pub unsafe extern "C" fn iw_element_kottwitz_json(
    group: *const IwGroup,
    x: *const IwElement,
) -> *mut c_char {
    let (Some(g), Some(x)) = (group_ref(group), element_ref(x)) else {
        return std::ptr::null_mut();
    };
    if !g.datum.owns(&x.inner) {
        set_error(IwStatus::InvalidInput, "element belongs to a different group");
        return std::ptr::null_mut();
    }
    let class = g.datum.kottwitz_class(&x.inner);
    out_string(json!({ "free": class.free, "torsion": class.torsion }).to_string())
}

/// Frees an element. Null is ignored.
///
/// # Safety
/// `x` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn iw_element_free(x: *mut IwElement) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// 1 if `x <= y` in Bruhat order, 0 if not, -1 on error.
///
/// # Safety
/// All pointers must be null or live pointers from this library.
#[no_mangle]
pub unsafe extern "C" fn iw_bruhat_leq(
    group: *const IwGroup,
    x: *const IwElement,
    y: *const IwElement,
) -> i32 {
    let (Some(g), Some(x), Some(y)) = (group_ref(group), element_ref(x), element_ref(y))
    else {
        return -1;
    };
    match cosets::bruhat_leq(&g.datum, &x.inner, &y.inner) {
        Ok(answer) => i32::from(answer),
        Err(e) => {
            set_error(coset_error(&e), &e.to_string());
            -1
        }
    }
}

/// All elements with length at most `max_len`, as a JSON array with the
/// same per-element fields as the command line. A `cap` of 0 uses the
/// default element cap. Free with `iw_string_free`.
///
/// # Safety
/// `group` must be null or a live group pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_enumerate_json(
    group: *const IwGroup,
    max_len: u64,
    cap: usize,
) -> *mut c_char {
    let Some(g) = group_ref(group) else { return std::ptr::null_mut() };
    let cap = if cap == 0 { DEFAULT_ELEMENT_CAP } else { cap };
    match cli::enumerate_rows(&g.datum, max_len, cap, false) {
        Ok(rows) => out_string(serde_json::Value::Array(rows).to_string()),
        Err(e) => {
            set_error(group_error(&e), &e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Double cosets for the parabolic pair given by affine node indices, as
/// a JSON array with the same fields as the command line. Null generator
/// pointers are allowed only with length 0 and mean the empty set. A
/// `cap` of 0 uses the default element cap. Free with `iw_string_free`.
///
/// # Safety
/// `left`/`right` must point to `left_len`/`right_len` readable values.
#[no_mangle]
pub unsafe extern "C" fn iw_dcosets_json(
    group: *const IwGroup,
    left: *const u32,
    left_len: usize,
    right: *const u32,
    right_len: usize,
    max_len: u64,
    cap: usize,
) -> *mut c_char {
    let Some(g) = group_ref(group) else { return std::ptr::null_mut() };
    if (left.is_null() && left_len > 0) || (right.is_null() && right_len > 0) {
        set_error(IwStatus::NullArgument, "generator list is null");
        return std::ptr::null_mut();
    }
    let gens = |ptr: *const u32, len: usize| -> Vec<usize> {
        if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(ptr, len).iter().map(|&i| i as usize).collect()
        }
    };
    let cap = if cap == 0 { DEFAULT_ELEMENT_CAP } else { cap };
    match cli::coset_rows(
        &g.datum,
        &gens(left, left_len),
        &gens(right, right_len),
        max_len,
        cap,
        false,
    ) {
        Ok(rows) => out_string(serde_json::Value::Array(rows).to_string()),
        Err(e) => {
            set_error(coset_error(&e), &e.to_string());
            std::ptr::null_mut()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn json_out(ptr: *mut c_char) -> serde_json::Value {
        assert!(!ptr.is_null());
        let v = serde_json::from_str(CStr::from_ptr(ptr).to_str().unwrap()).unwrap();
        iw_string_free(ptr);
        v
    }

    unsafe fn last_message() -> String {
        CStr::from_ptr(iw_last_error_message()).to_str().unwrap().to_string()
    }

    #[test]
    fn group_lifecycle_and_info() {
        unsafe {
            let g = iw_group_new(c("A2").as_ptr(), c("coweight").as_ptr());
            assert!(!g.is_null());
            assert_eq!(iw_group_rank(g), 2);
            let info = json_out(iw_group_info_json(g));
            assert_eq!(info["omega_order"], json!(3));
            assert_eq!(info["finite_weyl_order"], json!(6));
            iw_group_free(g);
        }
    }

    #[test]
    fn bad_inputs_set_status_and_message() {
        unsafe {
            assert!(iw_group_new(c("Z9").as_ptr(), std::ptr::null()).is_null());
            assert_eq!(iw_last_error_status(), IwStatus::InvalidInput);
            assert!(!last_message().is_empty());

            assert!(iw_group_new(std::ptr::null(), std::ptr::null()).is_null());
            assert_eq!(iw_last_error_status(), IwStatus::NullArgument);

            assert!(iw_group_from_json(c("{}").as_ptr()).is_null());
            assert_eq!(iw_last_error_status(), IwStatus::InvalidInput);

            let g = iw_group_new(c("A2").as_ptr(), std::ptr::null());
            assert!(iw_element_parse(g, c("w=5").as_ptr()).is_null());
            assert_eq!(iw_last_error_status(), IwStatus::InvalidInput);
            assert!(iw_element_simple(g, 9).is_null());
            iw_group_free(g);
        }
    }

    #[test]
    fn arithmetic_round_trips() {
        unsafe {
            let g = iw_group_new(c("A1").as_ptr(), std::ptr::null());
            let s0 = iw_element_simple(g, 0);
            let s1 = iw_element_simple(g, 1);
            let t = iw_element_translation(g, [1i64].as_ptr(), 1);
            let prod = iw_element_mul(g, s0, s1);
            assert_eq!(iw_element_eq(prod, t), 1);
            assert_eq!(iw_element_length(g, t), 2);

            let word = json_out(iw_element_reduced_word_json(g, t));
            assert_eq!(word["word"], json!([0, 1]));

            let inv = iw_element_inverse(g, prod);
            let e = iw_element_identity(g);
            let back = iw_element_mul(g, prod, inv);
            assert_eq!(iw_element_eq(back, e), 1);
            assert_eq!(iw_bruhat_leq(g, e, t), 1);
            assert_eq!(iw_bruhat_leq(g, t, e), 0);

            let class = json_out(iw_element_kottwitz_json(g, t));
            assert_eq!(class["free"], json!([]));

            for p in [s0, s1, t, prod, inv, e, back] {
                iw_element_free(p);
            }
            iw_group_free(g);
        }
    }

    #[test]
    fn elements_do_not_cross_groups() {
        unsafe {
            let g1 = iw_group_new(c("A1").as_ptr(), std::ptr::null());
            let g2 = iw_group_new(c("A2").as_ptr(), std::ptr::null());
            let x = iw_element_identity(g1);
            assert_eq!(iw_element_length(g2, x), -1);
            assert_eq!(iw_last_error_status(), IwStatus::InvalidInput);
            iw_element_free(x);
            iw_group_free(g1);
            iw_group_free(g2);
        }
    }

    #[test]
    fn json_tables_match_the_engine() {
        unsafe {
            let g = iw_group_new(c("A1").as_ptr(), std::ptr::null());
            let rows = json_out(iw_enumerate_json(g, 2, 0));
            assert_eq!(rows.as_array().unwrap().len(), 5);

            let left = [1u32];
            let classes = json_out(iw_dcosets_json(
                g,
                left.as_ptr(),
                1,
                left.as_ptr(),
                1,
                3,
                0,
            ));
            assert_eq!(classes.as_array().unwrap().len(), 3);

            // The full affine node set is not a finite subgroup.
            let bad = [0u32, 1];
            assert!(iw_dcosets_json(g, bad.as_ptr(), 2, std::ptr::null(), 0, 2, 0).is_null());
            assert_eq!(iw_last_error_status(), IwStatus::InfiniteSubgroup);

            // A tiny cap is a resource error.
            assert!(iw_enumerate_json(g, 8, 3).is_null());
            assert_eq!(iw_last_error_status(), IwStatus::CapExceeded);
            iw_group_free(g);
        }
    }
}
