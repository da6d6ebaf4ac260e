/* configuration block 31 */
var options31 = {
  width31: 10,
  height31: 20,
  resize31: function(scale31) {
    return scale31 * options31.width31;
  }
};
options31.resize31(2);
