//! What happens when the destination also appears on the right-hand side.

use kernelplan::{alias_guard, eval_stmt, exec_plan, lower, parse_statement, Matrix, Workspace};

fn main() {
    let mut ws = Workspace::new();
    ws.bind_vector("y", vec![1.0, 2.0, 3.0]).unwrap();
    ws.bind_vector("x", vec![1.0, 1.0, 1.0]).unwrap();
    ws.bind_matrix(
        "A",
        Matrix::from_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]).unwrap(),
    )
    .unwrap();
    ws.bind_scalar("c", 2.0).unwrap();

    for text in [
        "y = x + c*x",
        "y = y + c*x",
        "y = c*y - x",
        "y = x + y",
        "y = A*y",
        "y += y",
    ] {
        let stmt = parse_statement(text, &ws).unwrap();
        let plan = lower(&stmt, &ws).unwrap();
        println!("{text}  [{:?}]\n{plan}", alias_guard(&stmt));

        let mut got = ws.clone();
        exec_plan(&plan, &mut got).unwrap();
        let mut want = ws.clone();
        eval_stmt(&stmt, &mut want).unwrap();
        assert_eq!(got.vector("y"), want.vector("y"), "{text}");
    }
}
