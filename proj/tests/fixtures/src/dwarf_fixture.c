/* DWARF fixture: four subprograms plus one symtab/DWARF name conflict.
 * add_numbers carries an __asm__ rename, so the symbol table sees add_impl
 * while the DWARF DW_AT_name stays add_numbers.
 */

static volatile unsigned tick_count;

int add_numbers(int a, int b) __asm__("add_impl");
int add_numbers(int a, int b) { return a + b; }

int scale_sum(int x) { return add_numbers(x, x) * 3; }

void tick(void) { tick_count++; }

int start(void) {
    tick();
    return scale_sum(7);
}
