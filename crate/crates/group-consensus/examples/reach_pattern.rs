//! Reach decomposition and the asymptotic consensus pattern.
//!
//! A quotient with two sources splits into two reaches; the clusters they
//! share (the common part) converge into the convex hull of the reach
//! limits, with row-stochastic weights -L_F^-1 L_FR. For single integrators
//! the weights can be read off directly.
//!
//! ```bash
//! cargo run --example reach_pattern
//! ```

use nalgebra::{DMatrix, DVector};

use group_consensus::control::Dynamics;
use group_consensus::graph::{ClusteredDigraph, Edge};
use group_consensus::quotient;
use group_consensus::reduction;
use group_consensus::report::sig12;
use group_consensus::simulate;

fn main() -> group_consensus::Result<()> {
    // Agents 1 and 2 are their own sources; cluster {3, 4} listens to both.
    let graph = ClusteredDigraph::new(
        4,
        &[vec![1], vec![2], vec![3, 4]],
        &[
            Edge::new(1, 3, 0.3),
            Edge::new(1, 4, 0.3),
            Edge::new(2, 3, 0.2),
            Edge::new(2, 4, 0.2),
            Edge::new(3, 4, 1.0),
            Edge::new(4, 3, 1.0),
        ],
    )?;

    let q = quotient::quotient_graph(&graph);
    let decomposition = reduction::reach_decomposition(&q, &graph);
    println!("reaches: {}", decomposition.reach_count());
    for (p, (reach, exclusive)) in decomposition
        .reaches
        .iter()
        .zip(decomposition.exclusive.iter())
        .enumerate()
    {
        let reach_list: Vec<usize> = reach.iter().map(|c| c + 1).collect();
        let excl_list: Vec<usize> = exclusive.iter().map(|c| c + 1).collect();
        println!(
            "  reach {}: clusters {:?}, exclusive part {:?}",
            p + 1,
            reach_list,
            excl_list
        );
    }
    let common: Vec<usize> = decomposition.common.iter().map(|c| c + 1).collect();
    println!("  common part: {:?}", common);

    let weights = decomposition.convex_weights()?;
    println!();
    println!("convex weights -L_F^-1 L_FR (rows: common-part agents):");
    for r in 0..weights.nrows() {
        let row: Vec<String> = (0..weights.ncols()).map(|c| sig12(weights[(r, c)])).collect();
        println!("  [{}]", row.join(", "));
    }

    // Single integrators: the common part settles at the weighted average of
    // the source states.
    let integrators = Dynamics::new(
        DMatrix::from_element(1, 1, 0.0),
        DMatrix::from_element(1, 1, 1.0),
    )?;
    let x0 = DVector::from_vec(vec![2.0, -1.0, 0.5, 0.3]);
    let prediction = simulate::predict_limit(&graph, &integrators, &x0)?;
    let limit = prediction.state_at(0.0)?;
    println!();
    println!("single-integrator initial states: x1 = 2, x2 = -1, x3 = 0.5, x4 = 0.3");
    println!(
        "predicted limits: x1 -> {}, x2 -> {}, x3 -> {}, x4 -> {}",
        sig12(limit[0]),
        sig12(limit[1]),
        sig12(limit[2]),
        sig12(limit[3])
    );
    println!("(0.6 * x1(0) + 0.4 * x2(0) = {})", sig12(0.6 * x0[0] + 0.4 * x0[1]));

    Ok(())
}
