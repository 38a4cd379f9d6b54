//! Exhaustive generation of small objects, counting largest and smallest
//! component sizes. Independent of the library's recursions.

use expolog::FamilyId;

/// `hist[k]` = number of objects whose largest (resp. smallest) component
/// has `k` nodes, for one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histograms {
    pub largest: Vec<u64>,
    pub smallest: Vec<u64>,
}

impl Histograms {
    fn new(n: usize) -> Self {
        Histograms {
            largest: vec![0; n + 1],
            smallest: vec![0; n + 1],
        }
    }

    fn record(&mut self, sizes: &[usize], times: u64) {
        let max = *sizes.iter().max().unwrap();
        let min = *sizes.iter().min().unwrap();
        self.largest[max] += times;
        self.smallest[min] += times;
    }
}

/// Union-find with rollback (union by size, no path compression).
struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    log: Vec<Option<(usize, usize)>>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            log: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.log.push(None);
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.log.push(Some((ra, rb)));
    }

    fn undo(&mut self) {
        if let Some((ra, rb)) = self.log.pop().unwrap() {
            self.parent[rb] = rb;
            self.size[ra] -= self.size[rb];
        }
    }

    fn sizes(&self) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&i| self.parent[i] == i)
            .map(|i| self.size[i])
            .collect()
    }
}

fn permutations(n: usize, derangements_only: bool) -> Histograms {
    let mut h = Histograms::new(n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut visit = |p: &[usize]| {
        if derangements_only && p.iter().enumerate().any(|(i, &v)| i == v) {
            return;
        }
        let mut seen = vec![false; n];
        let mut sizes = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let (mut x, mut len) = (s, 0);
            while !seen[x] {
                seen[x] = true;
                x = p[x];
                len += 1;
            }
            sizes.push(len);
        }
        h.record(&sizes, 1);
    };
    // Heap's algorithm
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    h
}

/// All functions `[n] -> [n]`; the last coordinate is resolved in closed
/// form from the component structure of the first `n - 1` edges.
fn mappings(n: usize) -> Histograms {
    fn rec(i: usize, n: usize, dsu: &mut Dsu, h: &mut Histograms) {
        if i + 1 < n {
            for t in 0..n {
                dsu.union(i, t);
                rec(i + 1, n, dsu, h);
                dsu.undo();
            }
            return;
        }
        let last = n - 1;
        let rl = dsu.find(last);
        let roots: Vec<usize> = (0..n).filter(|&r| dsu.parent[r] == r).collect();
        let base: Vec<usize> = roots.iter().map(|&r| dsu.size[r]).collect();
        for (j, &rt) in roots.iter().enumerate() {
            // edges into component rt: size[rt] targets
            let times = dsu.size[rt] as u64;
            if rt == rl {
                h.record(&base, times);
            } else {
                let jl = roots.iter().position(|&r| r == rl).unwrap();
                let mut sizes: Vec<usize> = base
                    .iter()
                    .enumerate()
                    .filter(|&(q, _)| q != j && q != jl)
                    .map(|(_, &s)| s)
                    .collect();
                sizes.push(base[j] + base[jl]);
                h.record(&sizes, times);
            }
        }
    }
    let mut h = Histograms::new(n);
    rec(0, n, &mut Dsu::new(n), &mut h);
    h
}

/// All 2-regular simple graphs on `n` labeled vertices: repeatedly give the
/// smallest vertex of degree < 2 its missing neighbors, in increasing order.
fn two_regular(n: usize) -> Histograms {
    fn rec(n: usize, deg: &mut [u8], adj: &mut Vec<(usize, usize)>, h: &mut Histograms) {
        let Some(v) = (0..n).find(|&v| deg[v] < 2) else {
            let mut dsu = Dsu::new(n);
            for &(a, b) in adj.iter() {
                dsu.union(a, b);
            }
            h.record(&dsu.sizes(), 1);
            return;
        };
        let free: Vec<usize> = (v + 1..n)
            .filter(|&w| deg[w] < 2 && !adj.contains(&(v, w)))
            .collect();
        let need = 2 - deg[v] as usize;
        let pick =
            |ws: &[usize], deg: &mut [u8], adj: &mut Vec<(usize, usize)>, h: &mut Histograms| {
                for &w in ws {
                    deg[v] += 1;
                    deg[w] += 1;
                    adj.push((v, w));
                }
                rec(n, deg, adj, h);
                for &w in ws {
                    deg[v] -= 1;
                    deg[w] -= 1;
                    adj.pop();
                }
            };
        if need == 1 {
            for &w in &free {
                pick(&[w], deg, adj, h);
            }
        } else {
            for (i, &w1) in free.iter().enumerate() {
                for &w2 in &free[i + 1..] {
                    pick(&[w1, w2], deg, adj, h);
                }
            }
        }
    }
    let mut h = Histograms::new(n);
    rec(n, &mut vec![0; n], &mut Vec::new(), &mut h);
    h
}

/// Histograms of every object of size `n >= 1`.
pub fn histograms(family: FamilyId, n: usize) -> Histograms {
    match family {
        FamilyId::Permute => permutations(n, false),
        FamilyId::Derange => permutations(n, true),
        FamilyId::Map => mappings(n),
        FamilyId::Graph => two_regular(n),
    }
}
