use std::ffi::CString;

use pyo3::prelude::*;

fn run(code: &str) -> PyResult<()> {
    Python::attach(|py| {
        let code = CString::new(code).unwrap();
        py.run(&code, None, None)
    })
}

#[test]
fn module_works_from_python() {
    use massey_py::massey_py;
    pyo3::append_to_inittab!(massey_py);
    Python::initialize();

    run(r#"
import massey_py as m
assert m.outer_exponent(4, 2)["e"] == 2
x = m.UniTri(2, [[1, 1, 0], [0, 1, 1], [0, 0, 1]])
assert (x ** 4).is_identity() and not (x ** 2).is_identity()
cc = m.ConjClasses(4, 2)
r = cc.brauer([([1, 1, 0, 1], 1), ([1, 0, 1, 1], 1)])
assert (r["sha_dim"], r["formula_dim"]) == (1, 1)
assert m.massey_vanishes(m.Group.dihedral(4), [[0, 0], [0, 0]], 2)
"#)
    .unwrap();

    let err = run("import massey_py as m\nm.outer_exponent(3, 4)").unwrap_err();
    Python::attach(|py| assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py)));
    let err = run("import massey_py as m\nm.ConjClasses(6, 3, max_elems=10)").unwrap_err();
    Python::attach(|py| assert!(err.get_type(py).name().unwrap().to_string() == "BudgetExceeded"));
}
