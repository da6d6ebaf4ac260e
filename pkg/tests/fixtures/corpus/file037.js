/* configuration block 37 */
var options37 = {
  width37: 10,
  height37: 20,
  resize37: function(scale37) {
    return scale37 * options37.width37;
  }
};
options37.resize37(2);
