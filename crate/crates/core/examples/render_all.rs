fn main() {
    for l in gqd_core::pairing::standard_layouts() {
        println!("{}", gqd_core::pairing::render_layout(&l));
    }
}
