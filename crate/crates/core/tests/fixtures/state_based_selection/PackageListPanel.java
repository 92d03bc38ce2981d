import javax.swing.JButton;
import javax.swing.JList;
import javax.swing.JTextField;
import javax.swing.event.ListSelectionEvent;
import javax.swing.event.ListSelectionListener;

public class PackageListPanel implements ListSelectionListener {
  private JList list;
  private JButton removeButton;
  private JTextField packageName;

  public final void valueChanged(ListSelectionEvent e) {
    if (!e.getValueIsAdjusting()) {
      final int index = list.getSelectedIndex();
      if (index == -1) { //Command #1
        removeButton.setEnabled(false);
        packageName.setText("");
      } else if ((index == 0) || (index == 1)
          || (index == 2)) { //Command #2
        removeButton.setEnabled(false);
        packageName.setText("");
      } else { //Command #3
        removeButton.setEnabled(true);
        String name = list.getSelectedValue().toString();
        packageName.setText(name);
      }
    }
  }
}
